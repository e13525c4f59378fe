use thiserror::Error;

/// Errors raised by the analytics engine.
///
/// `Parse` and `Validation` carry enough location information for a user to
/// fix the offending input; the remaining variants describe degenerate
/// numerical situations that make a statistic undefined.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: parse error: {message}")]
    Parse { line: usize, message: String },

    #[error("{}validation error: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation { line: Option<usize>, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("shape mismatch: {0}")]
    Shape(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation {
            line: None,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
