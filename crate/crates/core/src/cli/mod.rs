//! Command-line front end of the `degenlab` binary.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver non-convergence (the
//! partial output is still written), 4 strict estimate failure.

pub mod args;
mod commands;
pub mod config;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

pub use args::{Cli, Command};
pub use commands::Outcome;

use crate::error::Error;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "DEGENLAB_WORKERS";

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NOT_CONVERGED: u8 = 3;
pub const EXIT_STRICT: u8 = 4;

pub fn exit_code(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::Success => EXIT_OK,
        Outcome::NotConverged => EXIT_NOT_CONVERGED,
        Outcome::StrictFailure => EXIT_STRICT,
    }
}

fn error_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Json(_) => EXIT_FAILURE,
        _ => EXIT_INVALID,
    }
}

fn init_workers() -> Result<(), String> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{WORKERS_ENV} must be a positive integer, got `{raw}`"))?;
    // a second initialization (repeated runs in one process) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: &Cli) -> crate::Result<Outcome> {
    match &cli.command {
        Command::Classify(a) => commands::classify_cmd(a),
        Command::Solve(a) => commands::solve_cmd(a),
        Command::Sequence(a) => commands::sequence_cmd(a),
        Command::Estimates(a) => commands::estimates_cmd(a),
        Command::Exponents(a) => commands::exponents_cmd(a),
        Command::PhaseDiagram(a) => commands::phase_cmd(a),
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    if let Err(msg) = init_workers() {
        eprintln!("error: {msg}");
        return EXIT_INVALID;
    }
    match execute(&cli) {
        Ok(outcome) => exit_code(outcome),
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
