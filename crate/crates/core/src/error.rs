use thiserror::Error;

/// Errors raised by the bicomplex engine.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments: unknown simplex, degree mismatch, bad index tuple.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The complex lacks a required structure (manifold, orientability, connectivity).
    #[error("structural error: {0}")]
    Structural(String),
    #[error("numeric error: {message} (residual {residual:e})")]
    Numeric { message: String, residual: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
