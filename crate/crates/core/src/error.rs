use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coordinate {index} out of range for a space of {len} coordinates")]
    Index { index: usize, len: usize },

    /// The requested computation exceeds a configured size limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),

    /// A documented precondition of an operation does not hold.
    #[error("contract violated: {0}")]
    Contract(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
