use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("schema version mismatch: expected {expected}, found {found}")]
    Version { expected: String, found: String },

    #[error("duplicate snapshot timestamp {0}")]
    DuplicateTimestamp(i64),

    #[error("insufficient relay pool: needed {needed}, available {available}")]
    InsufficientRelays { needed: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("circuit construction failed: {0}")]
    Circuit(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("simulation failure: {0}")]
    Simulation(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }

    /// Process exit code for this error: 1 usage, 2 data, 3 runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Parse { .. }
            | Error::Schema(_)
            | Error::Version { .. }
            | Error::DuplicateTimestamp(_)
            | Error::InsufficientRelays { .. }
            | Error::InvalidParam(_)
            | Error::Empty(_) => 2,
            Error::Io { .. } | Error::Circuit(_) | Error::Simulation(_) => 3,
        }
    }
}
