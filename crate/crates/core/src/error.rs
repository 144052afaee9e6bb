use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input: degree mismatches, bad indices, broken preconditions.
    #[error("input error: {0}")]
    Input(String),

    /// A configured budget was exceeded. The computation did not produce a wrong answer,
    /// it produced no answer.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("checkpoint integrity error in {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    /// Results that contradict each other, such as an exhausted degree above a nontrivial one.
    #[error("consistency violation: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code for this error: 2 for usage and input, 3 for checkpoint
    /// integrity, 4 for inconsistent results, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Parse(_) => 2,
            Error::Checkpoint { .. } | Error::Io { .. } => 3,
            Error::Consistency(_) => 4,
            Error::Capacity(_) => 1,
        }
    }

    pub(crate) fn checkpoint(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Checkpoint { path: path.into(), reason: reason.into() }
    }
}
