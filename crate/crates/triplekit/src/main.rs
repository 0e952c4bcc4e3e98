use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use triplekit::commands::{self, Outcome, Predicate};
use triplekit::suites::RunConfig;

#[derive(Parser)]
#[command(name = "triplekit", version, about = "Tripotent calculus and triple isomorphism reconstruction on Cartan factors")]
struct Cli {
    /// Master seed for sampling.
    #[arg(long, global = true, env = "TRIPLEKIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Absolute tolerance of every predicate.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_abs: f64,
    /// Relative tolerance of every predicate.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_rel: f64,
    /// Verification samples per reconstruction.
    #[arg(long, global = true, default_value_t = 300)]
    samples: usize,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PredicateArg {
    #[value(alias = "is_tripotent")]
    IsTripotent,
    #[value(alias = "is_orthogonal")]
    IsOrthogonal,
    Leq,
    Classify,
    #[value(alias = "is_quadrangle")]
    IsQuadrangle,
    #[value(alias = "is_trangle")]
    IsTrangle,
}

impl From<PredicateArg> for Predicate {
    fn from(p: PredicateArg) -> Self {
        match p {
            PredicateArg::IsTripotent => Predicate::IsTripotent,
            PredicateArg::IsOrthogonal => Predicate::IsOrthogonal,
            PredicateArg::Leq => Predicate::Leq,
            PredicateArg::Classify => Predicate::Classify,
            PredicateArg::IsQuadrangle => Predicate::IsQuadrangle,
            PredicateArg::IsTrangle => Predicate::IsTrangle,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Dimension, rank and unitary tripotents of a factor.
    FactorInfo {
        /// Factor spec, inline JSON or a file.
        spec: String,
    },
    /// Evaluate a tripotent predicate on element files.
    Check {
        predicate: PredicateArg,
        /// Element JSON files (or inline JSON).
        #[arg(required = true)]
        elements: Vec<String>,
    },
    /// Reconstruct a triple isomorphism from a tripotent oracle.
    Reconstruct {
        /// Factor spec, inline JSON or a file.
        #[arg(long)]
        factor: String,
        /// Generation recipe or table, inline JSON or a file.
        #[arg(long)]
        oracle: String,
    },
    /// Demonstrations.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
    /// Run the self-test suites.
    Selftest {
        /// Run only these suites (1 to 9); repeatable.
        #[arg(long = "suite", value_parser = clap::value_parser!(u8).range(1..=9))]
        suites: Vec<u8>,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Boost a spin state and compare it with its polar part.
    Lorentz {
        #[arg(long, allow_hyphen_values = true)]
        rapidity: f64,
        /// x, y, z or 1, 2, 3.
        #[arg(long)]
        axis: String,
        /// Unit vector b1,b2,b3.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = RunConfig { seed: cli.seed, tol_abs: cli.tol_abs, tol_rel: cli.tol_rel, samples: cli.samples };
    let tol = match run.tolerance() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(commands::INPUT_ERROR as u8);
        }
    };
    let outcome = match &cli.command {
        Command::FactorInfo { spec } => commands::factor_info(spec),
        Command::Check { predicate, elements } => commands::check((*predicate).into(), elements, tol),
        Command::Reconstruct { factor, oracle } => commands::reconstruct(factor, oracle, &run),
        Command::Demo { demo: Demo::Lorentz { rapidity, axis, direction } } => {
            commands::demo_lorentz(*rapidity, axis, direction, tol)
        }
        Command::Selftest { suites } => {
            let ids: Vec<usize> = suites.iter().map(|&s| usize::from(s)).collect();
            commands::selftest(&run, &ids)
        }
    };
    emit(&outcome, cli.out.as_ref())
}

fn emit(outcome: &Outcome, out: Option<&PathBuf>) -> ExitCode {
    let _ = if outcome.code == commands::INPUT_ERROR {
        writeln!(io::stderr().lock(), "{}", outcome.text)
    } else {
        writeln!(io::stdout().lock(), "{}", outcome.text)
    };
    if let Some(path) = out {
        let body = serde_json::to_string_pretty(&outcome.report).expect("reports serialize") + "\n";
        if let Err(e) = std::fs::write(path, body) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(commands::INPUT_ERROR as u8);
        }
    }
    ExitCode::from(outcome.code as u8)
}
