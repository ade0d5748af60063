use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slocc_cli::commands::{self, Common, Outcome, RandomKind, RandomParams};
use slocc_cli::selftest::Suite;
use slocc_cli::CliError;

/// SLOCC normal forms, monotones, convertibility and three-qubit distillation.
///
/// Exit codes: 0 ok, 2 invalid input, 3 class mismatch or undetermined
/// verdict, 4 internal inconsistency or failed self-check.
#[derive(Debug, Parser)]
#[command(name = "slocc", version)]
struct Cli {
    /// Seed for every random draw
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance for oracle agreement checks
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Cross-check the solver against its brute-force oracle
    #[arg(long, global = true)]
    oracle: bool,
    /// Also write the output to this file
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,
    /// Print nothing on stdout
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lorentz singular value decomposition of a two-qubit state
    Lsvd { input: PathBuf },
    /// M1, M2, concurrence, negativity and Wootters eigenvalues
    Monotones { input: PathBuf },
    /// Whether SOURCE can be converted into TARGET by SLOCC
    Convert { source: PathBuf, target: PathBuf },
    /// SLOCC class of a three-qubit pure state
    Classify3 { input: PathBuf },
    /// Optimal single-copy distillation of GHZ
    DistillGhz { input: PathBuf },
    /// Best single-copy distillation of W over one-party-unitary protocols
    DistillW {
        input: PathBuf,
        /// Random restarts per restricted search
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
    /// Seeded random state file
    Random {
        #[arg(value_enum)]
        kind: RandomKind,
        /// Werner parameter
        #[arg(long)]
        p: Option<f64>,
        /// Four Bell weights, comma separated
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        /// Largest boost rapidity of the random filters
        #[arg(long, default_value_t = 2.0)]
        boost_cap: f64,
    },
    /// Run a property suite
    Selftest {
        /// lsvd, variational, monotone, convert, tripartite or appendix
        suite: Suite,
        /// Number of trials (defaults to the acceptance size)
        #[arg(long)]
        n: Option<usize>,
        /// Directory for counterexample state files
        #[arg(long, default_value = "slocc-counterexamples")]
        counterexample_dir: PathBuf,
    },
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let common = Common { seed: cli.seed, tol: cli.tol, oracle: cli.oracle };
    if let Some(t) = cli.tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::Validation(format!("--tol must be finite and non-negative, got {t}")));
        }
    }
    match &cli.command {
        Command::Lsvd { input } => commands::lsvd(input, &common),
        Command::Monotones { input } => commands::monotones(input, &common),
        Command::Convert { source, target } => commands::convert(source, target, &common),
        Command::Classify3 { input } => commands::classify(input, &common),
        Command::DistillGhz { input } => commands::distill_ghz(input, &common),
        Command::DistillW { input, restarts } => commands::distill_w(input, *restarts, &common),
        Command::Random { kind, p, weights, boost_cap } => {
            let params = RandomParams { p: *p, weights: weights.clone(), boost_cap: *boost_cap };
            commands::random(*kind, &params, &common)
        }
        Command::Selftest { suite, n, counterexample_dir } => {
            commands::selftest(*suite, *n, Some(counterexample_dir.clone()), &common)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = dispatch(&cli).and_then(|out| {
        if let Some(path) = &cli.json_out {
            std::fs::write(path, &out.body)
                .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(out)
    });
    match outcome {
        Ok(out) => {
            if !cli.quiet {
                print!("{}", out.body);
            }
            if out.exit_code != 0 {
                eprintln!("slocc: finished with exit code {}", out.exit_code);
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("slocc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
