//! Frontend for the `ajk` binary. [`run`] parses arguments, executes one subcommand and returns
//! the process exit code: 0 on success, 2 for configuration errors, 3 for numerical failures,
//! 4 when a verification does not pass.

pub mod args;
mod commands;
mod parse;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use clap::Parser;

pub use args::Cli;
pub use parse::{parse_complex, parse_complex_vec, parse_list, parse_params};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Verification(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<ajk_measure::Error> for CliError {
    fn from(e: ajk_measure::Error) -> Self {
        use ajk_measure::Error::*;
        match e {
            InvalidDriver(_) | InvalidParameter(_) | InvalidProbability(_) | InvalidRate(_) | InvalidTimes(_)
            | InvalidNoise(_) | PreconditionViolated(_) | OutOfDomain { .. } | DomainViolation(_)
            | NotAnAtom { .. } | InsufficientPaths { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Runs the CLI; report and table output that has no `--out` path goes to `stdout`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("configuration error: --threads must be positive");
            return 2;
        }
        // fails only if the global pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match commands::dispatch(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.code()
        }
    }
}
