//! Acceptance run: the twelve criteria, one PASS/FAIL line each.
//!
//! Criteria 1–11 run the property suites at their full sizes through the
//! library; criterion 12 drives the `slocc` binary twice per command and
//! compares the bytes.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use slocc_cli::selftest::{self, Options, Suite, SuiteReport};

const SEED: u64 = 1;

struct Criterion {
    id: usize,
    title: &'static str,
    suite: Suite,
    n: usize,
    /// `(check, minimum sample count)`
    checks: &'static [(&'static str, usize)],
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "LSVD reconstruction, ordering and Lorentz checks on 1000 states",
        suite: Suite::Lsvd,
        n: 1000,
        checks: &[("reconstruction", 1000), ("ordering", 1000), ("lorentz", 1000)],
    },
    Criterion {
        id: 2,
        title: "s-vectors invariant under 1000 random det-1 filter pairs",
        suite: Suite::Lsvd,
        n: 1000,
        checks: &[("slocc_invariance", 1000)],
    },
    Criterion {
        id: 3,
        title: "filtering oracle agrees on 500 states; rho2 flagged quasi-distillable",
        suite: Suite::Lsvd,
        n: 1000,
        checks: &[("filtering_oracle", 500), ("rho2_quasi_distillable", 1)],
    },
    Criterion {
        id: 4,
        title: "variational minima over 200 states x 4 functionals x 500 samples",
        suite: Suite::Variational,
        n: 200,
        checks: &[("sample_above_closed_form", 800), ("optimizer_attains_closed_form", 800)],
    },
    Criterion {
        id: 5,
        title: "concurrence routes on 1000 states, Werner grid, s = H lambda",
        suite: Suite::Monotone,
        n: 1000,
        checks: &[("concurrence_routes", 1000), ("werner_concurrence", 20), ("relation_residual", 1000)],
    },
    Criterion {
        id: 6,
        title: "M1, M2 non-increasing on average over 1000 local POVM trials per party",
        suite: Suite::Monotone,
        n: 1000,
        checks: &[("monotonicity", 1000)],
    },
    Criterion {
        id: 7,
        title: "mixing solver vs grid on 1000 pairs; Bell->Werner; Werner 0.6->0.9",
        suite: Suite::Convert,
        n: 1000,
        checks: &[
            ("grid_disagreement", 900),
            ("concurrence_increase", 1),
            ("bell_to_werner_infeasible", 20),
            ("werner_0.6_to_0.9_feasible", 1),
        ],
    },
    Criterion {
        id: 8,
        title: "three-qubit classes, 100 orbits of 100 filters, tangle grid",
        suite: Suite::Tripartite,
        n: 100,
        checks: &[("fixed_classes", 7), ("orbit_class_changes", 100), ("generalized_ghz_tangle", 20)],
    },
    Criterion {
        id: 9,
        title: "GHZ/W filter residuals and symmetry families on 100 states each",
        suite: Suite::Tripartite,
        n: 100,
        checks: &[("ghz_filters", 100), ("w_filters", 100), ("ghz_family", 100), ("w_family", 100)],
    },
    Criterion {
        id: 10,
        title: "GHZ solver vs oracle on 25 states, ratios, 1000 eigvec and curve draws",
        suite: Suite::Appendix,
        n: 25,
        checks: &[
            ("solver_oracle", 25),
            ("ratio_conditions", 25),
            ("eigvec_formula", 1000),
            ("curve_crossings_not_one", 1000),
        ],
    },
    Criterion {
        id: 11,
        title: "POVM feasibility probes at 1 +- 1e-6",
        suite: Suite::Tripartite,
        n: 100,
        checks: &[("povm_misjudged", 6)],
    },
];

fn judge(c: &Criterion, report: &SuiteReport) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for &(name, min_samples) in c.checks {
        match report.check(name) {
            Some(s) => {
                let enough = s.samples >= min_samples;
                ok &= s.passed && enough;
                let worst = s.worst.map_or("-".to_string(), |w| format!("{w:.2e}"));
                parts.push(format!("{name}: worst {worst} vs {:.0e} over {}", s.bound, s.samples));
            }
            None => {
                ok = false;
                parts.push(format!("{name}: missing"));
            }
        }
    }
    (ok, parts.join("; "))
}

fn slocc(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_slocc")).args(args).output().expect("slocc runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

/// Criterion 12: every command, run twice with the same seed and inputs.
fn determinism(dir: &Path) -> (bool, String) {
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let mut failures = Vec::new();
    let mut runs = 0;
    let generators: &[(&str, &[&str])] = &[
        ("pure2q.json", &["random", "pure2q", "--seed", "5"]),
        ("wishart.json", &["random", "wishart", "--seed", "5"]),
        ("werner.json", &["random", "werner", "--p", "0.7"]),
        ("bell.json", &["random", "bell-diagonal", "--weights", "0,0,0,1"]),
        ("pure3q.json", &["random", "pure3q", "--seed", "7"]),
        ("ghz.json", &["random", "ghz-class", "--seed", "9"]),
        ("w.json", &["random", "w-class", "--seed", "9"]),
    ];
    for (file, args) in generators {
        let (first, code) = slocc(args);
        let (second, _) = slocc(args);
        runs += 1;
        if code != 0 || first != second {
            failures.push(args.join(" "));
        }
        std::fs::write(dir.join(file), first).expect("writable temp dir");
    }
    let ce = p("counterexamples");
    let commands: Vec<Vec<String>> = [
        vec!["lsvd", &p("wishart.json")],
        vec!["lsvd", &p("pure2q.json")],
        vec!["monotones", &p("werner.json")],
        vec!["convert", &p("bell.json"), &p("werner.json")],
        vec!["convert", &p("wishart.json"), &p("pure2q.json")],
        vec!["classify3", &p("pure3q.json")],
        vec!["distill-ghz", &p("ghz.json"), "--oracle"],
        vec!["distill-w", &p("w.json"), "--seed", "3", "--restarts", "4", "--oracle"],
        vec!["selftest", "lsvd", "--n", "20", "--seed", "4", "--counterexample-dir", &ce],
        vec!["selftest", "variational", "--n", "3", "--seed", "4", "--counterexample-dir", &ce],
        vec!["selftest", "monotone", "--n", "20", "--seed", "4", "--counterexample-dir", &ce],
        vec!["selftest", "convert", "--n", "20", "--seed", "4", "--counterexample-dir", &ce],
        vec!["selftest", "tripartite", "--n", "5", "--seed", "4", "--counterexample-dir", &ce],
        vec!["selftest", "appendix", "--n", "1", "--seed", "4", "--counterexample-dir", &ce],
    ]
    .iter()
    .map(|v| v.iter().map(|s| s.to_string()).collect())
    .collect();
    for args in &commands {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (first, c1) = slocc(&args);
        let (second, c2) = slocc(&args);
        runs += 1;
        if first.is_empty() || first != second || c1 != c2 {
            failures.push(args.join(" "));
        }
    }
    let detail = if failures.is_empty() {
        format!("{runs} commands byte-identical across two runs")
    } else {
        format!("differing: {}", failures.join(" | "))
    };
    (failures.is_empty(), detail)
}

fn main() -> ExitCode {
    let mut reports: Vec<(Suite, SuiteReport, f64)> = Vec::new();
    let mut all_ok = true;
    for c in CRITERIA {
        if !reports.iter().any(|(s, r, _)| *s == c.suite && r.n == c.n) {
            let start = Instant::now();
            let opts = Options { seed: SEED, n: c.n, tol: None, counterexample_dir: None };
            let report = selftest::run(c.suite, &opts).expect("suite runs");
            reports.push((c.suite, report, start.elapsed().as_secs_f64()));
        }
        let (_, report, secs) = reports.iter().find(|(s, r, _)| *s == c.suite && r.n == c.n).expect("just ran");
        let (ok, detail) = judge(c, report);
        all_ok &= ok;
        println!("{} criterion {:>2}: {} [{detail}] ({} suite {secs:.1}s)", verdict(ok), c.id, c.title, c.suite);
    }
    let dir = tempfile::tempdir().expect("temp dir");
    let start = Instant::now();
    let (ok, detail) = determinism(dir.path());
    all_ok &= ok;
    println!(
        "{} criterion 12: every CLI command byte-identical across runs [{detail}] ({:.1}s)",
        verdict(ok),
        start.elapsed().as_secs_f64()
    );
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
