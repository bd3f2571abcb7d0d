use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A malformed record in a line-oriented input.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid date at line {line}: {value:?}")]
    InvalidDate { line: usize, value: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unknown concept {0}")]
    UnknownConcept(String),

    #[error("unknown patient {0}")]
    UnknownPatient(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("undefined cosine for zero vector")]
    ZeroVector,

    #[error("index {index} out of range for size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("input is not sorted: {0}")]
    Unsorted(&'static str),

    #[error("auc needs at least one positive and one negative label")]
    SingleClass,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
