//! `nevlab`: compute Nevanlinna functionals, run the verification suite and
//! emit plot data.

mod args;
mod compute;
mod plot;
mod svg;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nevlab::error::NevError;

#[derive(Parser)]
#[command(name = "nevlab", version, about = "Nevanlinna functionals for concrete meromorphic functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one functional and print it as JSON.
    Compute(compute::ComputeArgs),
    /// Run the verification checks over a corpus and write a JSON report.
    Verify(verify::VerifyArgs),
    /// Emit CSV (and optionally SVG) series.
    Plot(plot::PlotArgs),
}

/// Outcome classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    ChecksFailed,
    Usage(String),
    Capability(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::ChecksFailed => 1,
            Failure::Usage(_) => 2,
            Failure::Capability(_) => 3,
            Failure::Numeric(_) => 4,
        }
    }
}

impl From<NevError> for Failure {
    fn from(e: NevError) -> Self {
        match e {
            NevError::InvalidInput(_) | NevError::Corpus(_) => Failure::Usage(e.to_string()),
            NevError::CapabilityRejected(_) => Failure::Capability(e.to_string()),
            NevError::NumericFailure(_) => Failure::Numeric(e.to_string()),
        }
    }
}

pub type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Compute(a) => compute::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Plot(a) => plot::run(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::ChecksFailed => {}
                Failure::Usage(m) | Failure::Capability(m) | Failure::Numeric(m) => eprintln!("nevlab: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
