use thiserror::Error;

#[derive(Debug, Error)]
pub enum TasError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("generation overflow: {0}")]
    GenerationOverflow(String),

    /// A scheduler produced something that breaks its own contract.
    #[error("internal contract violation: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = TasError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> TasError {
    TasError::InvalidArgument(msg.into())
}
