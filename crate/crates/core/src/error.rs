use thiserror::Error;

/// Failure classes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NevError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    /// The model lacks a capability (usually a complete divisor) that the
    /// operation needs.
    #[error("capability rejected: {0}")]
    CapabilityRejected(String),
    #[error("corpus error: {0}")]
    Corpus(String),
}

pub type Result<T> = std::result::Result<T, NevError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(NevError::InvalidInput(msg.into()))
}
