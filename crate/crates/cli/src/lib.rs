//! Command-line front end for `miocoh`.

pub mod args;
pub mod commands;
pub mod error;
pub mod figures;
pub mod output;

use serde_json::json;

pub use args::Cli;
pub use commands::{run, Outcome};
pub use error::CliError;
pub use output::{Artifact, SweepMeta, SweepResult};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;

/// Runs a parsed command, writes its artifact and returns the process exit code.
pub fn execute(cli: &Cli) -> u8 {
    let emitted = match run(cli) {
        Ok(outcome) => outcome.artifact.emit(cli.format, cli.out.as_deref()).map(|_| outcome.inconclusive),
        Err(e) if e.is_infeasible() => {
            let report = json!({ "status": "infeasible", "message": e.to_string() });
            Artifact::record(report).and_then(|a| a.emit(cli.format, cli.out.as_deref())).map(|_| true)
        }
        Err(e) => Err(e),
    };
    match emitted {
        Ok(false) => EXIT_OK,
        Ok(true) => EXIT_INCONCLUSIVE,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
