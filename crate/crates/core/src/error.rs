use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("sequence too short: need at least {required} values, got {actual}")]
    Length { required: usize, actual: usize },

    #[error("numerical failure: {message}")]
    Numerical {
        message: String,
        /// Eigenvalues that had converged before the iteration gave up.
        partial: Vec<Complex64>,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("insufficient coverage: missing sequence indices {missing:?} for {context}")]
    Coverage { context: String, missing: Vec<usize> },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
