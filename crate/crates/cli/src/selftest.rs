//! Property suites behind `slocc selftest`.
//!
//! Trial `t` of a suite draws everything from `trial_rng(seed, t)`, trials run
//! on the rayon pool, and results are merged in trial order, so a report only
//! depends on `(suite, seed, n, tol)`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use slocc::algebra::{apply_local2, apply_local3, bell, DensityMatrix2Q, Mat2, Mat4, ThreeQubitPure};
use slocc::convert::{bell_spectrum, convertible, grid_feasibility, mixing_margin, solve_mixing_system, BellSpectrum};
use slocc::filtering::filtering_normal_form_oracle;
use slocc::lorentz::{eta, random_filter, rho_to_r, RMat4};
use slocc::lsvd::lsvd_of;
use slocc::monotones::{
    closed_form, concurrence, functional_value, monotone_mc_check, monotone_report, variational_optimizer,
    variational_sample, wootters_concurrence,
};
use slocc::random::{ghz_class, haar_pure3, pure_state, simplex4, trial_rng, w_class, werner, wishart_state};
use slocc::tripartite::{
    classify3, curve_crossings, eigvec_formula_check, ghz_distillation_oracle, ghz_filters, ghz_symmetry_family,
    optimal_ghz_distillation, povm_feasible, ray_residual, three_tangle, w_filters, w_symmetry_family, Slocc3Class,
};
use slocc::{NormalFormClass, C64};

use crate::error::CliError;
use crate::state_file::StateFile;

const BOOST_CAP: f64 = 2.0;
const VARIATIONAL_SAMPLES: usize = 500;
const ORBIT_FILTERS: usize = 100;
/// Appendix suite: eigenvector and curve probes per solver state.
const PROBES_PER_STATE: usize = 40;
/// Pairs this close to the feasibility boundary are not compared to the grid.
pub const GRID_MARGIN: f64 = 0.01;
pub const GRID_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lsvd,
    Variational,
    Monotone,
    Convert,
    Tripartite,
    Appendix,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Self::Lsvd, Self::Variational, Self::Monotone, Self::Convert, Self::Tripartite, Self::Appendix];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lsvd => "lsvd",
            Self::Variational => "variational",
            Self::Monotone => "monotone",
            Self::Convert => "convert",
            Self::Tripartite => "tripartite",
            Self::Appendix => "appendix",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| CliError::Validation(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    /// Passes when every value is at most the bound.
    AtMost,
    /// Passes when every value is at least the bound.
    AtLeast,
}

/// One measured quantity of one trial.
#[derive(Debug, Clone)]
struct Sample {
    check: &'static str,
    value: f64,
    witness: Vec<Witness>,
}

#[derive(Debug, Clone)]
enum Witness {
    Density(DensityMatrix2Q),
    Pure3(ThreeQubitPure),
}

impl Witness {
    fn to_file(&self, meta: BTreeMap<String, String>) -> StateFile {
        match self {
            Self::Density(rho) => StateFile::from_density(rho, meta),
            Self::Pure3(psi) => StateFile::from_pure3(psi, meta),
        }
    }
}

fn sample(check: &'static str, value: f64, witness: Vec<Witness>) -> Sample {
    Sample { check, value, witness }
}

/// Errors inside a trial count as violations with a NaN value.
fn failed(check: &'static str, witness: Vec<Witness>) -> Sample {
    sample(check, f64::NAN, witness)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub name: &'static str,
    pub sense: Sense,
    pub bound: f64,
    /// Largest value for `AtMost`, smallest for `AtLeast`; `None` without samples.
    pub worst: Option<f64>,
    pub samples: usize,
    pub violations: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub trial: usize,
    pub value: Option<f64>,
    pub counterexamples: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub n: usize,
    pub checks: Vec<CheckSummary>,
    pub violations: Vec<Violation>,
    /// Convert suite: random pairs inside the boundary margin, not compared.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped_near_boundary: Option<usize>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Spec {
    name: &'static str,
    sense: Sense,
    bound: f64,
}

const fn at_most(name: &'static str, bound: f64) -> Spec {
    Spec { name, sense: Sense::AtMost, bound }
}

const fn at_least(name: &'static str, bound: f64) -> Spec {
    Spec { name, sense: Sense::AtLeast, bound }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub seed: u64,
    pub n: usize,
    /// Overrides the solver/oracle agreement bounds.
    pub tol: Option<f64>,
    /// Where counterexamples go; `None` keeps them in memory only.
    pub counterexample_dir: Option<PathBuf>,
}

pub fn run(suite: Suite, opts: &Options) -> Result<SuiteReport, CliError> {
    let oracle_tol = |default: f64| opts.tol.unwrap_or(default);
    let (specs, trials, fixed): (Vec<Spec>, Vec<Vec<Sample>>, Vec<Sample>) = match suite {
        Suite::Lsvd => (
            vec![
                at_most("reconstruction", 1e-8),
                at_most("ordering", 1e-9),
                at_most("lorentz", 1e-9),
                at_most("slocc_invariance", 1e-7),
                at_most("filtering_oracle", oracle_tol(1e-6)),
                at_most("rho2_quasi_distillable", 1e-7),
            ],
            trials(opts, lsvd_trial),
            rho2_fixed(),
        ),
        Suite::Variational => (
            vec![at_least("sample_above_closed_form", -1e-9), at_most("optimizer_attains_closed_form", 1e-8)],
            trials(opts, variational_trial),
            Vec::new(),
        ),
        Suite::Monotone => (
            vec![
                at_most("concurrence_routes", 1e-7),
                at_most("relation_residual", 1e-7),
                at_least("monotonicity", -1e-7),
                at_most("werner_concurrence", 1e-9),
            ],
            trials(opts, monotone_trial),
            werner_fixed(),
        ),
        Suite::Convert => (
            vec![
                at_most("grid_disagreement", 0.0),
                at_most("concurrence_increase", 1e-9),
                at_most("bell_to_werner_infeasible", 0.0),
                at_most("werner_0.6_to_0.9_feasible", 0.0),
            ],
            trials(opts, convert_trial),
            convert_fixed(),
        ),
        Suite::Tripartite => (
            vec![
                at_most("fixed_classes", 0.0),
                at_most("orbit_class_changes", 0.0),
                at_most("generalized_ghz_tangle", 1e-9),
                at_most("ghz_filters", 1e-7),
                at_most("w_filters", 1e-7),
                at_most("ghz_family", 1e-8),
                at_most("w_family", 1e-8),
                at_most("povm_misjudged", 0.0),
            ],
            trials(opts, tripartite_trial),
            tripartite_fixed(),
        ),
        Suite::Appendix => (
            vec![
                at_most("solver_oracle", oracle_tol(1e-6)),
                at_most("ratio_conditions", 1e-8),
                at_most("eigvec_formula", 1e-9),
                at_most("curve_crossings_not_one", 0.0),
            ],
            trials(opts, appendix_trial),
            Vec::new(),
        ),
    };
    let mut report = merge(suite, opts, &specs, trials.into_iter().chain(std::iter::once(fixed)))?;
    if suite == Suite::Convert {
        report.skipped_near_boundary = Some(skipped_pairs(opts));
    }
    Ok(report)
}

fn trials(opts: &Options, f: fn(u64, usize) -> Vec<Sample>) -> Vec<Vec<Sample>> {
    (0..opts.n).into_par_iter().map(|t| f(opts.seed, t)).collect()
}

/// Folds per-trial samples in order. The last batch holds the fixed examples
/// and is reported with trial index `n`.
fn merge(
    suite: Suite,
    opts: &Options,
    specs: &[Spec],
    batches: impl Iterator<Item = Vec<Sample>>,
) -> Result<SuiteReport, CliError> {
    let mut checks: Vec<CheckSummary> = specs
        .iter()
        .map(|s| CheckSummary {
            name: s.name,
            sense: s.sense,
            bound: s.bound,
            worst: None,
            samples: 0,
            violations: 0,
            passed: true,
        })
        .collect();
    let mut violations = Vec::new();
    for (trial, batch) in batches.enumerate() {
        for s in batch {
            let idx = checks
                .iter()
                .position(|c| c.name == s.check)
                .ok_or_else(|| CliError::Internal(format!("sample for unknown check {}", s.check)))?;
            let c = &mut checks[idx];
            c.samples += 1;
            let ok = match c.sense {
                Sense::AtMost => s.value <= c.bound,
                Sense::AtLeast => s.value >= c.bound,
            };
            c.worst = match (c.worst, s.value.is_nan()) {
                (_, true) => Some(f64::NAN),
                (None, false) => Some(s.value),
                (Some(w), false) if w.is_nan() => Some(w),
                (Some(w), false) => Some(match c.sense {
                    Sense::AtMost => w.max(s.value),
                    Sense::AtLeast => w.min(s.value),
                }),
            };
            if !ok {
                c.violations += 1;
                c.passed = false;
                let files = write_counterexamples(suite, opts, s.check, trial, &s.witness)?;
                violations.push(Violation {
                    check: s.check,
                    trial,
                    value: s.value.is_finite().then_some(s.value),
                    counterexamples: files,
                });
            }
        }
    }
    Ok(SuiteReport { suite, n: opts.n, checks, violations, skipped_near_boundary: None })
}

fn write_counterexamples(
    suite: Suite,
    opts: &Options,
    check: &str,
    trial: usize,
    witness: &[Witness],
) -> Result<Vec<String>, CliError> {
    let Some(dir) = &opts.counterexample_dir else {
        return Ok(Vec::new());
    };
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for (k, w) in witness.iter().enumerate() {
        let meta = BTreeMap::from([
            ("suite".to_string(), suite.to_string()),
            ("check".to_string(), check.to_string()),
            ("seed".to_string(), opts.seed.to_string()),
            ("trial".to_string(), trial.to_string()),
        ]);
        let path = dir.join(format!("{suite}-{check}-seed{}-trial{trial}-{k}.json", opts.seed));
        std::fs::write(&path, w.to_file(meta).to_json())?;
        out.push(display_path(&path));
    }
    Ok(out)
}

fn display_path(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn rmax(m: &RMat4) -> f64 {
    m.abs().max()
}

/// Largest violation of `LᵀηL = η`, `det L = 1`, `L00 ≥ 1`, relative to the
/// squared entry size of `L` (boosts make entries large).
pub fn lorentz_defect(l: &RMat4) -> f64 {
    let scale = rmax(l).powi(2).max(1.0);
    let metric = rmax(&(l.transpose() * eta() * l - eta())) / scale;
    let det = (l.determinant() - 1.0).abs() / scale;
    metric.max(det).max(1.0 - l[(0, 0)])
}

fn scaled_spectrum_gap(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn lsvd_trial(seed: u64, t: usize) -> Vec<Sample> {
    let mut rng = trial_rng(seed, t as u64);
    let rho = wishart_state(&mut rng);
    let w = || vec![Witness::Density(rho.clone())];
    let mut out = Vec::new();
    let (d, r) = match (lsvd_of(&rho), rho_to_r(&rho)) {
        (Ok(d), Ok(r)) => (d, r),
        _ => return vec![failed("reconstruction", w())],
    };
    let s = d.s;
    out.push(sample("reconstruction", rmax(&(d.reconstruct() - r.0)), w()));
    out.push(sample("ordering", (s[1] - s[0]).max(s[2] - s[1]).max(s[3].abs() - s[2]).max(0.0), w()));
    out.push(sample("lorentz", lorentz_defect(&d.l1.0).max(lorentz_defect(&d.l2.0)), w()));

    let a = random_filter(&mut rng, BOOST_CAP);
    let b = random_filter(&mut rng, BOOST_CAP);
    let moved = apply_local2(rho.matrix(), &a.m, &b.m);
    let p = moved.trace().re;
    let invariance = DensityMatrix2Q::from_unnormalized(moved)
        .and_then(|x| lsvd_of(&x))
        .map(|x| scaled_spectrum_gap(&x.s.map(|v| v * p), &s));
    out.push(match invariance {
        Ok(v) => sample("slocc_invariance", v, w()),
        Err(_) => failed("slocc_invariance", w()),
    });

    // The filtering oracle is slow to converge; half the states suffice.
    if t.is_multiple_of(2) {
        let oracle = filtering_normal_form_oracle(&rho, 5000, 1e-13).and_then(|o| {
            if o.converged {
                o.spectrum()
            } else {
                Err(slocc::Error::InternalInconsistency("oracle did not converge".into()))
            }
        });
        out.push(match oracle {
            Ok(so) => sample("filtering_oracle", scaled_spectrum_gap(&so, &s), w()),
            Err(_) => failed("filtering_oracle", w()),
        });
    }
    out
}

/// `½|ψ+⟩⟨ψ+| + ½|00⟩⟨00|`, the quasi-distillable example.
pub fn rho2() -> DensityMatrix2Q {
    let p = bell::psi_plus();
    let mut m: Mat4 = p * p.adjoint() * C64::new(0.5, 0.0);
    m[(0, 0)] += C64::new(0.5, 0.0);
    DensityMatrix2Q::new(m).expect("valid state")
}

fn rho2_fixed() -> Vec<Sample> {
    let rho = rho2();
    let w = vec![Witness::Density(rho.clone())];
    let oracle_converged = filtering_normal_form_oracle(&rho, 500, 1e-12).map(|o| o.converged).unwrap_or(true);
    let value = match lsvd_of(&rho) {
        Ok(d) if d.class == NormalFormClass::QuasiDistillable && !oracle_converged => d
            .abcd
            .map(|abcd| scaled_spectrum_gap(&abcd, &[1.0, 0.5, 0.5, 0.5]))
            .unwrap_or(f64::NAN),
        _ => f64::NAN,
    };
    vec![sample("rho2_quasi_distillable", value, w)]
}

fn variational_trial(seed: u64, t: usize) -> Vec<Sample> {
    let mut rng = trial_rng(seed, t as u64);
    let rho = wishart_state(&mut rng);
    let sub_seed: u64 = rng.random();
    let w = || vec![Witness::Density(rho.clone())];
    let Ok(r) = rho_to_r(&rho) else {
        return vec![failed("sample_above_closed_form", w())];
    };
    let optimizer = variational_optimizer(&r);
    let spectrum = lsvd_of(&rho).map(|d| d.s);
    let mut out = Vec::new();
    for k in 1..=4 {
        out.push(match variational_sample(&r, k, VARIATIONAL_SAMPLES, sub_seed, BOOST_CAP) {
            Ok(v) => sample("sample_above_closed_form", v.sample_min - v.closed_form, w()),
            Err(_) => failed("sample_above_closed_form", w()),
        });
        let attained = match (&optimizer, &spectrum) {
            (Ok((l1, l2)), Ok(s)) => functional_value(&r, l1, l2, k).map(|v| (v - closed_form(s, k)).abs()),
            _ => Err(slocc::Error::InternalInconsistency("no optimizer".into())),
        };
        out.push(match attained {
            Ok(v) => sample("optimizer_attains_closed_form", v, w()),
            Err(_) => failed("optimizer_attains_closed_form", w()),
        });
    }
    out
}

fn monotone_trial(seed: u64, t: usize) -> Vec<Sample> {
    let mut rng = trial_rng(seed, t as u64);
    // Alternate full-rank and pure inputs; pure states carry most entanglement.
    let rho = if t.is_multiple_of(2) { wishart_state(&mut rng) } else { pure_state(&mut rng) };
    let sub_seed: u64 = rng.random();
    let w = || vec![Witness::Density(rho.clone())];
    let mut out = vec![match (concurrence(&rho), wootters_concurrence(&rho)) {
        (Ok(a), Ok(b)) => sample("concurrence_routes", (a - b).abs(), w()),
        _ => failed("concurrence_routes", w()),
    }];
    out.push(match monotone_report(&rho) {
        Ok(m) => sample("relation_residual", m.relation_residual, w()),
        Err(_) => failed("relation_residual", w()),
    });
    out.push(match monotone_mc_check(&rho, 1, sub_seed) {
        Ok(v) => sample("monotonicity", v, w()),
        Err(_) => failed("monotonicity", w()),
    });
    out
}

fn werner_fixed() -> Vec<Sample> {
    (0..20)
        .map(|i| {
            let p = i as f64 / 19.0;
            let want = ((3.0 * p - 1.0) / 2.0).max(0.0);
            match werner(p).and_then(|rho| concurrence(&rho).map(|c| (rho, c))) {
                Ok((rho, c)) => sample("werner_concurrence", (c - want).abs(), vec![Witness::Density(rho)]),
                Err(_) => failed("werner_concurrence", Vec::new()),
            }
        })
        .collect()
}

/// A random Bell-spectrum pair. Odd trials pair two independent spectra; even
/// trials mix the source with a random separable partner, so feasible pairs
/// are well represented.
pub fn convert_pair(seed: u64, t: usize) -> (BellSpectrum, BellSpectrum) {
    let mut rng = trial_rng(seed, t as u64);
    let lam = BellSpectrum::from_unsorted(simplex4(&mut rng)).expect("simplex point");
    let mu = if t % 2 == 1 {
        simplex4(&mut rng)
    } else {
        let x: f64 = rng.random();
        let tail = simplex4(&mut rng);
        let s = tail[1] + tail[2] + tail[3];
        let mut partner = [0.5, 0.5 * tail[1] / s, 0.5 * tail[2] / s, 0.5 * tail[3] / s];
        partner[1..].rotate_left(t / 2 % 3);
        std::array::from_fn(|i| (1.0 - x) * lam.0[i] + x * partner[i])
    };
    (lam, BellSpectrum::from_unsorted(mu).expect("simplex point"))
}

fn near_boundary(lam: &BellSpectrum, mu: &BellSpectrum) -> bool {
    mixing_margin(lam, mu).abs() < GRID_MARGIN
}

fn skipped_pairs(opts: &Options) -> usize {
    (0..opts.n)
        .filter(|&t| {
            let (lam, mu) = convert_pair(opts.seed, t);
            near_boundary(&lam, &mu)
        })
        .count()
}

fn bell_witness(lam: &BellSpectrum, mu: &BellSpectrum) -> Vec<Witness> {
    [lam, mu]
        .iter()
        .filter_map(|s| slocc::random::bell_diagonal(s.0).ok().map(Witness::Density))
        .collect()
}

fn convert_trial(seed: u64, t: usize) -> Vec<Sample> {
    let (lam, mu) = convert_pair(seed, t);
    let verdict = solve_mixing_system(&lam, &mu);
    let mut out = Vec::new();
    if !near_boundary(&lam, &mu) {
        let grid = grid_feasibility(&lam, &mu, GRID_STEP);
        out.push(sample("grid_disagreement", f64::from(u8::from(grid != verdict.feasible)), bell_witness(&lam, &mu)));
    }
    if verdict.feasible {
        out.push(sample("concurrence_increase", mu.concurrence() - lam.concurrence(), bell_witness(&lam, &mu)));
    }
    out
}

fn convert_fixed() -> Vec<Sample> {
    let bell_state = DensityMatrix2Q::from_pure(&bell::psi_minus()).expect("normalized");
    let mut out = Vec::new();
    for i in 0..20 {
        let p = i as f64 / 19.0;
        let Ok(target) = werner(p) else {
            out.push(failed("bell_to_werner_infeasible", Vec::new()));
            continue;
        };
        let bad = convertible(&bell_state, &target).map(|v| !v.feasible).unwrap_or(true);
        out.push(sample("bell_to_werner_infeasible", f64::from(u8::from(bad)), vec![Witness::Density(target)]));
    }
    let pair = werner(0.6).and_then(|a| werner(0.9).map(|b| (a, b)));
    out.push(match pair {
        Ok((a, b)) => {
            let bad = convertible(&a, &b).map(|v| v.feasible || !v.is_determined()).unwrap_or(true);
            sample("werner_0.6_to_0.9_feasible", f64::from(u8::from(bad)), vec![Witness::Density(a), Witness::Density(b)])
        }
        Err(_) => failed("werner_0.6_to_0.9_feasible", Vec::new()),
    });
    // Bell-spectrum route too: both states are Bell diagonal.
    if let (Ok(a), Ok(b)) = (werner(0.6).and_then(|x| bell_spectrum(&x)), werner(0.9).and_then(|x| bell_spectrum(&x))) {
        let bad = solve_mixing_system(&a, &b).feasible;
        out.push(sample("werner_0.6_to_0.9_feasible", f64::from(u8::from(bad)), Vec::new()));
    }
    out
}

fn ket(bits: &[usize]) -> slocc::algebra::Ket8 {
    let mut v = slocc::algebra::Ket8::zeros();
    for &b in bits {
        v[b] = C64::new(1.0, 0.0);
    }
    v
}

/// Named examples for each class: product, the three biseparable cuts, GHZ, W.
pub fn class_examples() -> Vec<(ThreeQubitPure, Slocc3Class)> {
    let n = |v| ThreeQubitPure::normalized(v).expect("nonzero");
    vec![
        (n(ket(&[0])), Slocc3Class::FullProduct),
        // |++0⟩
        (n(ket(&[0, 2, 4, 6])), Slocc3Class::FullProduct),
        // (|00⟩ + |11⟩)_AB |0⟩_C
        (n(ket(&[0b000, 0b110])), Slocc3Class::BiseparableAB),
        (n(ket(&[0b000, 0b101])), Slocc3Class::BiseparableAC),
        (n(ket(&[0b000, 0b011])), Slocc3Class::BiseparableBC),
        (ThreeQubitPure::ghz(), Slocc3Class::GHZclass),
        (ThreeQubitPure::w(), Slocc3Class::Wclass),
    ]
}

fn tripartite_fixed() -> Vec<Sample> {
    let mut out = Vec::new();
    for (psi, want) in class_examples() {
        let bad = classify3(&psi).map(|c| c != want).unwrap_or(true);
        out.push(sample("fixed_classes", f64::from(u8::from(bad)), vec![Witness::Pure3(psi)]));
    }
    for i in 0..20 {
        let p = i as f64 / 19.0;
        out.push(match ThreeQubitPure::generalized_ghz(p) {
            Ok(psi) => {
                let v = (three_tangle(&psi) - 4.0 * p * (1.0 - p)).abs();
                sample("generalized_ghz_tangle", v, vec![Witness::Pure3(psi)])
            }
            Err(_) => failed("generalized_ghz_tangle", Vec::new()),
        });
    }
    for (branches, feasible) in povm_probes() {
        let bad = povm_feasible(&branches).map(|f| f != feasible).unwrap_or(true);
        out.push(sample("povm_misjudged", f64::from(u8::from(bad)), Vec::new()));
    }
    out
}

type Branches = Vec<(f64, [Mat2; 3])>;

/// Branch sets whose operator sum has largest eigenvalue exactly `1 ± 1e-6`,
/// paired with the expected feasibility.
pub fn povm_probes() -> Vec<(Branches, bool)> {
    let eps: f64 = 1e-6;
    let re = |x: f64| C64::new(x, 0.0);
    let id = Mat2::identity();
    let diag = |a: f64, b: f64| Mat2::new(re(a), re(0.0), re(0.0), re(b));
    let mut probes = Vec::new();
    for (sign, feasible) in [(-1.0f64, true), (1.0, false)] {
        let top = 1.0 + sign * eps;
        // one branch: q² · λmax(M†M) = top
        probes.push((vec![(top.sqrt(), [id, id, id])], feasible));
        // two branches splitting the |1⟩ weight on party A
        let w = 0.3;
        probes.push((
            vec![(1.0, [diag(1.0, (w * top).sqrt()), id, id]), (1.0, [diag(0.0, ((1.0 - w) * top).sqrt()), id, id])],
            feasible,
        ));
        // a non-diagonal branch: a unitary in front leaves M†M = diag(1, top)
        let h = 0.5f64.sqrt();
        let u = Mat2::new(re(h), re(h), re(h), re(-h));
        probes.push((vec![(1.0, [id, u * diag(1.0, top.sqrt()), id])], feasible));
    }
    probes
}

fn orbit_base(rng: &mut impl Rng, t: usize) -> ThreeQubitPure {
    match t % 4 {
        0 => haar_pure3(rng),
        1 => ThreeQubitPure::w(),
        2 => class_examples()[2 + t / 4 % 3].0.clone(),
        _ => class_examples()[t / 4 % 2].0.clone(),
    }
}

fn tripartite_trial(seed: u64, t: usize) -> Vec<Sample> {
    let mut rng = trial_rng(seed, t as u64);
    let mut out = Vec::new();

    let base = orbit_base(&mut rng, t);
    let want = classify3(&base);
    let mut changes = 0u32;
    let mut first_bad = None;
    for _ in 0..ORBIT_FILTERS {
        let [a, b, c]: [Mat2; 3] = std::array::from_fn(|_| random_filter(&mut rng, BOOST_CAP).m);
        let moved = ThreeQubitPure::normalized(apply_local3(base.amplitudes(), &a, &b, &c));
        let same = match (&want, moved.as_ref().map(classify3)) {
            (Ok(w), Ok(Ok(got))) => *w == got,
            _ => false,
        };
        if !same {
            changes += 1;
            first_bad = first_bad.or(moved.ok());
        }
    }
    let mut witness = vec![Witness::Pure3(base)];
    witness.extend(first_bad.map(Witness::Pure3));
    out.push(sample("orbit_class_changes", f64::from(changes), witness));

    let ghz_target = ThreeQubitPure::ghz();
    let psi = ghz_class(&mut rng, BOOST_CAP);
    let a = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    let b = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    let w = || vec![Witness::Pure3(psi.clone())];
    match ghz_filters(&psi) {
        Ok(ft) => {
            out.push(sample("ghz_filters", ray_residual(&ft.apply(&psi), ghz_target.amplitudes()), w()));
            out.push(match ghz_symmetry_family(&psi, &ft, a, b) {
                Ok(fam) => sample("ghz_family", ray_residual(&fam.apply(&psi), ghz_target.amplitudes()), w()),
                Err(_) => failed("ghz_family", w()),
            });
        }
        Err(_) => out.push(failed("ghz_filters", w())),
    }

    let w_target = ThreeQubitPure::w();
    let psi = w_class(&mut rng, BOOST_CAP);
    let [x, y, z]: [C64; 3] =
        std::array::from_fn(|_| C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
    let w = || vec![Witness::Pure3(psi.clone())];
    match w_filters(&psi) {
        Ok(ft) => {
            out.push(sample("w_filters", ray_residual(&ft.apply(&psi), w_target.amplitudes()), w()));
            out.push(match w_symmetry_family(&psi, &ft, x, y, z) {
                Ok(fam) => sample("w_family", ray_residual(&fam.apply(&psi), w_target.amplitudes()), w()),
                Err(_) => failed("w_family", w()),
            });
        }
        Err(_) => out.push(failed("w_filters", w())),
    }
    out
}

fn appendix_trial(seed: u64, t: usize) -> Vec<Sample> {
    let mut rng = trial_rng(seed, t as u64);
    let psi = ghz_class(&mut rng, BOOST_CAP);
    let w = || vec![Witness::Pure3(psi.clone())];
    let mut out = Vec::new();
    match (optimal_ghz_distillation(&psi), ghz_distillation_oracle(&psi)) {
        (Ok(res), Ok((p, _, _))) => {
            out.push(sample("solver_oracle", (res.p_opt - p).abs(), w()));
            out.push(sample("ratio_conditions", res.ratio_residual, w()));
        }
        _ => out.push(failed("solver_oracle", w())),
    }
    for _ in 0..PROBES_PER_STATE {
        let x = random_filter(&mut rng, 3.0).m;
        let h = x * x.adjoint();
        let scale = rng.random_range(0.5..2.0);
        out.push(match eigvec_formula_check(&h, scale) {
            Ok(v) => sample("eigvec_formula", v, Vec::new()),
            Err(_) => failed("eigvec_formula", Vec::new()),
        });
        let z0: [f64; 8] = std::array::from_fn(|_| 10f64.powf(rng.random_range(-3.0..3.0)));
        let not_one = curve_crossings(&z0).map(|c| c.count != 1).unwrap_or(true);
        out.push(sample("curve_crossings_not_one", f64::from(u8::from(not_one)), Vec::new()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(n: usize) -> Options {
        Options { seed: 1, n, tol: None, counterexample_dir: None }
    }

    #[test]
    fn suites_pass_at_small_size() {
        for suite in Suite::ALL {
            let r = run(suite, &opts(4)).unwrap();
            assert!(r.passed(), "{suite}: {:?}", r.violations);
            assert!(r.checks.iter().all(|c| c.samples > 0), "{suite}: {:?}", r.checks);
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn tight_bound_reports_violation_with_counterexample() {
        let dir = tempfile::tempdir().unwrap();
        let o = Options { seed: 2, n: 2, tol: Some(0.0), counterexample_dir: Some(dir.path().to_path_buf()) };
        let r = run(Suite::Lsvd, &o).unwrap();
        let c = r.check("filtering_oracle").unwrap();
        // agreement is never bit-exact, so a zero tolerance must fail
        assert!(!c.passed);
        let v = r.violations.iter().find(|v| v.check == "filtering_oracle").unwrap();
        let text = std::fs::read_to_string(&v.counterexamples[0]).unwrap();
        StateFile::parse(&text).unwrap().density().unwrap();
    }

    #[test]
    fn povm_probes_are_balanced() {
        let probes = povm_probes();
        assert_eq!(probes.iter().filter(|p| p.1).count(), probes.len() / 2);
        for (branches, _) in &probes {
            assert!(branches.iter().all(|(q, _)| *q > 0.0));
        }
    }
}
