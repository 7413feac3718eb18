use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("failed to parse config: {0}")]
    ConfigParse(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("log line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("log integrity: {0}")]
    Integrity(String),
    #[error("log truncated: first missing record is #{index} ({what})")]
    Truncated { index: usize, what: String },
    #[error("config hash {found} does not match the log's {expected}")]
    ConfigMismatch { expected: String, found: String },
    #[error("invalid batch: {0}")]
    InvalidBatch(String),
}

impl SimError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
