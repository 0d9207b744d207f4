use thiserror::Error;

/// Errors raised by category operations.
///
/// `Invalid` always names the violated invariant so that callers (and the
/// CLI's exit-code contract) can distinguish malformed input from a failed
/// mathematical check.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatError {
    #[error("type mismatch: {0}")]
    Mismatch(String),
    #[error("invalid morphism: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no mediating morphism: {0}")]
    NoMediator(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = CatError> = std::result::Result<T, E>;

impl CatError {
    pub fn mismatch(msg: impl Into<String>) -> Self {
        CatError::Mismatch(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        CatError::Invalid(msg.into())
    }
}
