//! Command-line driver for `selfsim-core`: run configuration, system files,
//! CSV/JSON output and gnuplot scripts.
//!
//! Exit codes from [`run`]: `0` on success, `2` on configuration or usage
//! errors, `1` on solver failures and failed `check` cases.

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

pub mod check;
pub mod cli;
pub mod config;
pub mod output;
pub mod system;

pub use config::{ConfigError, RunConfig};

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Solver(selfsim_core::Error),
    Io(std::io::Error),
    /// Number of failed `check` cases.
    Check(usize),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<selfsim_core::Error> for Failure {
    fn from(e: selfsim_core::Error) -> Self {
        Failure::Solver(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e}"),
            Failure::Solver(e) => write!(f, "error: {}: {e}", e.name()),
            Failure::Io(e) => write!(f, "io error: {e}"),
            Failure::Check(n) => write!(f, "check: {n} case(s) failed"),
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match cli::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli::execute(parsed) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}
