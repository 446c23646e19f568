//! Shared error type for the whole crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes do not conform to an operation's shape rules.
    #[error("shape mismatch in {kind}: {left:?} vs {right:?}")]
    ShapeMismatch {
        kind: String,
        left: Vec<usize>,
        right: Vec<usize>,
    },

    /// Input is outside an operation's mathematical domain.
    #[error("domain violation in {kind}: {message}")]
    Domain { kind: String, message: String },

    /// A precondition on an operation or type invariant was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Malformed input file (header, layout).
    #[error("format error: {0}")]
    Format(String),

    /// Unparseable cell in an input file.
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    /// A stored artifact failed its integrity checks.
    #[error("corrupted artifact: {0}")]
    Corrupt(String),

    /// A loss became NaN or infinite during training.
    #[error("non-finite loss in {phase} ({term})")]
    NonFinite { phase: String, term: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(kind: &str, left: &[usize], right: &[usize]) -> Self {
        Error::ShapeMismatch {
            kind: kind.to_string(),
            left: left.to_vec(),
            right: right.to_vec(),
        }
    }

    pub(crate) fn domain(kind: &str, message: impl Into<String>) -> Self {
        Error::Domain {
            kind: kind.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn contract(message: impl Into<String>) -> Self {
        Error::Contract(message.into())
    }
}
