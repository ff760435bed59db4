//! Command-line front end for `steering-core`.

pub mod commands;
pub mod config;
pub mod output;
pub mod state;

use thiserror::Error;

/// Errors carrying the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    BoundViolation(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Io(_) => 3,
            CliError::BoundViolation(_) => 4,
            CliError::Solver(_) => 5,
        }
    }
}

impl From<steering_core::Error> for CliError {
    fn from(e: steering_core::Error) -> Self {
        match e {
            steering_core::Error::Solver(msg) => CliError::Solver(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
