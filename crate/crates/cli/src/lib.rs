//! Command-line front end: derive operators from model or coefficient files,
//! verify them against independent checks, and run the wave simulations.

mod derive;
mod input;
mod simulate;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use derive::{DeriveOutput, Provenance};
pub use input::{DeriveInput, ReflectionInput, SimulateInput, SCHEMA_VERSION};
pub use verify::{Check, Suite, VerifyReport};

/// Exit status contract.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_HYPERBOLIC: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Multiplies every residual tolerance.
pub const TOLERANCE_SCALE_VAR: &str = "TTBC_TOLERANCE_SCALE";

#[derive(Debug, Parser)]
#[command(
    name = "ttbc",
    version,
    about = "Truncated transparent boundary conditions for hyperbolic systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive the boundary operator for a model or raw coefficients.
    Derive {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run the verification suites and write a pass/fail report.
    Verify {
        /// Suites to run, comma separated; all of them when omitted.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        suite: Option<Vec<String>>,
        /// Oracle fixture file; the bundled one when omitted.
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Report destination; standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run one simulation and write its trace as CSV.
    Simulate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Sweep plane-wave reflection over a list of angles.
    Reflection {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// List the built-in models with an example configuration each.
    ListModels,
}

/// Error carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: i32, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(error: E) -> Self {
        Self::new(EXIT_INPUT, error)
    }
}

pub type Outcome = Result<(), Failure>;

/// Reads the tolerance scale from the environment; 1 when unset.
pub fn tolerance_scale() -> anyhow::Result<f64> {
    match std::env::var(TOLERANCE_SCALE_VAR) {
        Err(_) => Ok(1.0),
        Ok(text) => {
            let v: f64 = text.trim().parse().map_err(|_| {
                anyhow::anyhow!("{TOLERANCE_SCALE_VAR} must be a number, got {text:?}")
            })?;
            anyhow::ensure!(
                v.is_finite() && v > 0.0,
                "{TOLERANCE_SCALE_VAR} must be positive, got {v}"
            );
            Ok(v)
        }
    }
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Derive { input, output } => derive::run(&input, &output),
        Command::Verify {
            suite,
            fixture,
            output,
        } => verify::run(suite, fixture.as_deref(), output.as_deref()),
        Command::Simulate { input, output } => simulate::run_simulation(&input, &output),
        Command::Reflection { input, output } => simulate::run_sweep(&input, &output),
        Command::ListModels => {
            print!("{}", derive::model_listing());
            Ok(())
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_OK
            };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            failure.code
        }
    }
}
