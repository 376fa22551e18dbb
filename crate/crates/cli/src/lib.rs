//! Library side of the `b92-keyrate` command: argument validation, the four
//! run modes and CSV output.

pub mod args;
pub mod error;
pub mod format;
pub mod run;

use std::fs::File;
use std::io::{self, BufWriter};

pub use args::{Cli, Mode, Plan, RunSpec};
pub use error::CliError;
pub use run::{compute, find_threshold, run, Outcome, RunStatus, Threshold};

/// Validates `cli` and runs it, writing to `--output` or standard output.
pub fn execute(cli: Cli) -> Result<RunStatus, CliError> {
    let spec = cli.into_spec()?;
    match &spec.output {
        Some(path) => run(&spec, BufWriter::new(File::create(path)?)),
        None => run(&spec, io::stdout().lock()),
    }
}
