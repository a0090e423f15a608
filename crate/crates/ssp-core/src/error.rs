//! Crate-wide error type.
//!
//! Transport failures are the only retriable class; everything else is a
//! caller bug or bad input and must not be retried.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller-supplied data violated a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Transient backend failure (network, rate limit). Safe to retry.
    #[error("transport error: {0}")]
    Transport(String),

    /// One or more structural violations, reported together.
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// Corpus file problem tied to a specific line.
    #[error("corpus line {line}: {message}")]
    CorpusLine { line: usize, message: String },

    /// Record id seen more than once.
    #[error("duplicate record id {id:?} at line {line}")]
    DuplicateId { id: String, line: usize },

    /// Record is missing a field an operation requires.
    #[error("record {id:?} is missing {field}")]
    MissingField { id: String, field: &'static str },

    /// Theme label outside the registry taxonomy.
    #[error("unknown theme label {0}")]
    UnknownLabel(u32),

    /// Theme exists but has no camera assigned.
    #[error("theme {0:?} has no assigned camera")]
    UnassignedTheme(String),

    /// Numerical failure (non-PSD matrix, non-finite values, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures that a retry with backoff may resolve.
    pub fn is_retriable(&self) -> bool {
        matches!(self, Error::Transport(_))
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
