use thiserror::Error;

/// Domain errors. Every variant is a property of the input data, not of the process.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("search space too large: {0}")]
    Overflow(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("certificate rejected: {0}")]
    Certificate(String),
    #[error("illegal event: {0}")]
    IllegalEvent(String),
    #[error("parse error at {path}: {reason}")]
    Parse { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
