use thiserror::Error;

/// Errors raised by library operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("unknown cone {0:?}")]
    UnknownCone(Vec<usize>),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("divisor is not nef")]
    NotNef,
    #[error("divisor is not ample")]
    NotAmple,
    #[error("zero family: {0}")]
    ZeroFamily(String),
    #[error("no weights: {0}")]
    NoWeights(String),
    #[error("box too small: {0}")]
    BoxTooSmall(String),
    #[error("search limit exceeded: {0}")]
    SearchLimit(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
