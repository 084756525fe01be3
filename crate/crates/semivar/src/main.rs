use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use semivar::commands::{self, CliError};
use semivar::report::Report;

/// Bounded-variation functionals, distances and precompactness certificates
/// for grid-sampled functions valued in metric semigroups.
#[derive(Parser)]
#[command(name = "semivar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Family configuration (JSON).
    #[arg(long, value_name = "FILE")]
    family_config: Option<PathBuf>,
    /// Seed for randomized suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Search method: auto|brute|bb|greedy|jordan.
    #[arg(long, default_value = "auto")]
    method: String,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Supremum of the variation of one function.
    Variation {
        /// Function file (JSON).
        function: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Distance between two functions.
    Distance {
        /// First function file.
        a: PathBuf,
        /// Second function file, on the same grid.
        b: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a property suite: semigroup, axioms, lemmas or search-oracle.
    Verify {
        suite: String,
        /// Cases per family and instance.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Build and verify an epsilon-net for a function family.
    Precompact {
        /// Family file (JSON).
        family: PathBuf,
        /// Target radius of the net.
        #[arg(long)]
        epsilon: f64,
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> Result<(Report, Option<PathBuf>), CliError> {
    let out = |c: &Common| c.out.clone();
    let cfg = |c: &Common| c.family_config.clone();
    let report_and_out = match cli.command {
        Command::Variation { function, common } => {
            let method = commands::parse_method(&common.method)?;
            let r = commands::variation(&function, cfg(&common).as_deref(), method, common.seed)?;
            (r, out(&common))
        }
        Command::Distance { a, b, common } => {
            let method = commands::parse_method(&common.method)?;
            let r = commands::distance(&a, &b, cfg(&common).as_deref(), method, common.seed)?;
            (r, out(&common))
        }
        Command::Verify {
            suite,
            count,
            common,
        } => {
            if commands::parse_method(&common.method)? != semivar_core::Method::Auto {
                return Err(CliError::input("verify supports only --method auto"));
            }
            let seed = common
                .seed
                .ok_or_else(|| CliError::input("verify requires --seed"))?;
            let r = commands::verify(&suite, seed, count, cfg(&common).as_deref())?;
            (r, out(&common))
        }
        Command::Precompact {
            family,
            epsilon,
            common,
        } => {
            let method = commands::parse_method(&common.method)?;
            let r = commands::precompact(
                &family,
                epsilon,
                cfg(&common).as_deref(),
                method,
                common.seed,
            )?;
            (r, out(&common))
        }
    };
    Ok(report_and_out)
}

fn emit(report: &Report, out: Option<&Path>) -> std::io::Result<()> {
    let text = report.to_json();
    match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, out)) => {
            if let Err(e) = emit(&report, out.as_deref()) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(commands::EXIT_INPUT);
            }
            ExitCode::from(commands::exit_code(&report))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
