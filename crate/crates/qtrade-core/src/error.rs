use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A state failed a structural invariant (normalization, hermiticity,
    /// positivity, trace, dimension bookkeeping).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Subsystem dimensions of two objects do not line up.
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A numerical routine produced a non-finite value.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
