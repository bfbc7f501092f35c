use thiserror::Error;

/// Errors raised when an operation is called outside its domain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter violates the mathematical precondition of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is well-formed but exceeds a configured size cap.
    #[error("capacity error: {what} = {requested} exceeds cap {cap}")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    /// The operation has no exact evaluator for these parameters.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Malformed textual input (rationals, JSON documents).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
