use thiserror::Error;

/// Errors raised across the estimation stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    Asymmetric { asymmetry: f64 },
    #[error("non-finite data: {0}")]
    NonFinite(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("partition error: {0}")]
    Partition(String),
    #[error("sample outside design support: {0}")]
    Support(String),
    #[error("ill-conditioned system: {0}")]
    Conditioning(String),
    #[error("unsupported capability: {0}")]
    Capability(String),
    #[error("estimation failed: {0}")]
    Estimation(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
