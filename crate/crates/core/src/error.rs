use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("series did not converge after {terms} terms (partial value {partial})")]
    SeriesNoConverge { partial: Complex64, terms: usize },

    #[error("insufficient tail decay: {0}")]
    InsufficientDecay(String),

    #[error("least-squares solve failed: {0}")]
    SolveFailed(String),

    #[error("serialization: {0}")]
    Serialization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
