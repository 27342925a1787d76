//! Command-line driver for the `qmotzkin` library: path enumeration and
//! sampling, boundary-chain simulation, identity cross-checks, local-limit
//! error tables and special-function values, written as CSV or JSON.
//!
//! Exit status: 0 on success, 1 when a `verify` check fails, 2 when a
//! numerical guard trips, 3 for invalid configuration.

pub mod args;
pub mod commands;
pub mod config;
pub mod table;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numeric guard: {0}")]
    Numeric(String),
    #[error("output: {0}")]
    Output(String),
}

impl From<qmotzkin::Error> for CliError {
    fn from(e: qmotzkin::Error) -> Self {
        if e.is_numeric_guard() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 2,
            CliError::Config(_) | CliError::Output(_) => 3,
        }
    }
}

pub const EXIT_CHECK_FAILED: i32 = 1;

/// Runs one command and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qmotzkin {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

fn execute(command: &Command) -> Result<i32, CliError> {
    let cfg = RunConfig::resolve(command.flags())?;
    let (table, code) = match command {
        Command::Enumerate(_) => (commands::enumerate(&cfg)?, 0),
        Command::Sample(_) => (commands::sample(&cfg)?, 0),
        Command::Chain(_) => (commands::chain(&cfg)?, 0),
        Command::Verify(_) => {
            let (t, ok) = commands::verify(&cfg)?;
            (t, if ok { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Locallimit(_) => (commands::locallimit(&cfg)?, 0),
        Command::Specialfn(_) => (commands::specialfn(&cfg)?, 0),
    };
    let text = table.render(command.name(), &cfg);
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(e.to_string()))?,
    }
    Ok(code)
}
