use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("copula density evaluated on the cube boundary")]
    Boundary,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no certificate: {0}")]
    NoCertificate(String),

    #[error("non-convergent: {0}")]
    NonConvergent(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
