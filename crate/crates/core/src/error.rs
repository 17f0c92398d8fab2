use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: index {value} outside [1, {max}]")]
    Range { line: usize, value: i64, max: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("size guard exceeded for {what}: limit {limit}, requested {found}")]
    Guard {
        what: &'static str,
        limit: usize,
        found: usize,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors that stem from malformed input text rather than
    /// from a well-formed request the mathematics rejects.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Range { .. } | Error::Json(_))
    }
}
