use thiserror::Error;

/// Errors raised by the library. Every variant corresponds to a rejected input;
/// numerical "failures" such as a property counterexample are reports, not errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("invalid interval [{lo}, {hi}): lower end must be below upper end")]
    EmptyInterval { lo: String, hi: String },
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("entry {index} of the prime sequence is invalid: {reason}")]
    InvalidPrime { index: usize, reason: String },
    #[error("stage {0} is not available")]
    StageUnavailable(usize),
    #[error("not tower-aligned: {0}")]
    NotAligned(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-concave tabulation: {0}")]
    NotConcave(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
