use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input not found: {what} {}", path.display())]
    MissingInput { what: &'static str, path: PathBuf },
    #[error("input not found: no {0} given")]
    MissingArgument(&'static str),
    #[error("reading {what} {}: {source}", path.display())]
    Read {
        what: &'static str,
        path: PathBuf,
        source: io::Error,
    },
    #[error("invalid {what} {}: {message}", path.display())]
    Invalid {
        what: &'static str,
        path: PathBuf,
        message: String,
    },
    #[error("{0}")]
    Validation(String),
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::MissingInput { .. } | CliError::MissingArgument(_) => 2,
            CliError::Output { .. } => 3,
            CliError::Invalid { .. } | CliError::Validation(_) => 4,
            CliError::Read { .. } | CliError::Internal(_) => 1,
        }
    }

    pub fn invalid(what: &'static str, path: impl Into<PathBuf>, err: impl ToString) -> Self {
        CliError::Invalid {
            what,
            path: path.into(),
            message: err.to_string(),
        }
    }
}
