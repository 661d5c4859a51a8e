//! `interchange-lab` command line.
//!
//! Exit codes: 0 when every asserted check held, 1 when one failed, 2 on an
//! operational error (bad flags, unreadable input, state budget exceeded).

mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Failure modes of a run, mapped to exit codes.
#[derive(Debug)]
pub enum RunError {
    /// Every check ran but at least one asserted check failed.
    Failed,
    /// The run could not complete.
    Operational(String),
}

impl From<interchange_lab::Error> for RunError {
    fn from(e: interchange_lab::Error) -> Self {
        RunError::Operational(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Operational(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Failed) => ExitCode::from(1),
        Err(RunError::Operational(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
