use std::fmt;
use std::process::ExitCode;

use laat_core::LaatError;

/// Failure of a subcommand, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config values or config files. Exit code 2.
    Usage(String),
    /// Unreadable, malformed or inconsistent data. Exit code 3.
    Data(String),
    /// The stationary solve ran out of iterations. Exit code 4.
    Convergence(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Convergence(_) => 4,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Convergence(m) => write!(f, "convergence error: {m}"),
        }
    }
}

impl From<LaatError> for CliError {
    fn from(e: LaatError) -> Self {
        match e {
            LaatError::NoConvergence { .. } => CliError::Convergence(e.to_string()),
            LaatError::UnknownAttribute(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
