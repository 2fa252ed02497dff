use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const SCHEMA: i32 = 2;
    pub const PRECONDITION: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical abort: {0}")]
    Numerical(String),

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Schema(_) => exit::SCHEMA,
            CliError::Precondition(_) | CliError::Write { .. } => exit::PRECONDITION,
            CliError::Numerical(_) => exit::NUMERICAL,
        }
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        CliError::Schema(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        CliError::Precondition(msg.into())
    }
}

impl From<formdyn::Error> for CliError {
    fn from(e: formdyn::Error) -> Self {
        match e {
            formdyn::Error::Numerical(msg) => CliError::Numerical(msg),
            formdyn::Error::Precondition(msg) => CliError::Precondition(msg),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
