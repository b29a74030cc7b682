use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the simulator, the estimators, the allocation loops and
/// the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid simulator parameter `{key}`: {reason}")]
    InvalidParams { key: String, reason: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("singular design: {0}")]
    SingularDesign(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty estimate set")]
    EmptyEstimates,

    #[error("invalid allocation config `{key}`: {reason}")]
    InvalidAllocation { key: String, reason: String },

    #[error("invalid config `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn params(key: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParams {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn alloc(key: &str, reason: impl Into<String>) -> Self {
        Error::InvalidAllocation {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
