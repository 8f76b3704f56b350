//! Command-line driver for `leviflat`: configuration, commands, reports,
//! mesh export and the verification suite.
//!
//! Exit codes: 0 when every requested certificate passes, 1 when a
//! certificate fails, 2 for configuration errors, 3 when a solver does not
//! converge, 4 for I/O failures.

pub mod commands;
pub mod config;
pub mod io;
pub mod mesh;
pub mod report;
pub mod suite;

use std::path::Path;

use thiserror::Error;

pub use commands::{run, Command};
pub use config::RunConfig;
pub use report::Report;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "LEVIFLAT_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Schema(String),
    #[error("certificate failed: {0}")]
    Certificate(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Certificate(_) => 1,
            CliError::Schema(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<leviflat::Error> for CliError {
    fn from(e: leviflat::Error) -> Self {
        use leviflat::Error as E;
        match e {
            E::NonContraction { .. } | E::NotCertified { .. } | E::SweepFailed { .. } | E::NonFinite(_) => {
                CliError::NonConvergence(e.to_string())
            }
            E::InvalidGrid(_) | E::InvalidArgument(_) | E::BoundViolation(_) => CliError::Schema(e.to_string()),
            _ => CliError::Certificate(e.to_string()),
        }
    }
}

/// Thread count from [`THREADS_ENV`]; `None` leaves the default (available
/// parallelism).
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Schema(format!("{THREADS_ENV}: '{s}' is not a positive integer"))),
        },
    }
}
