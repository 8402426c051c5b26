use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("constraint violation: {0}")]
    Constraint(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid dataset: {0}")]
    Data(String),

    #[error("non-finite objective at gamma = {gamma}")]
    NonFinite { gamma: f64 },

    #[error("non-finite objective: {0}")]
    Numeric(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn constraint(msg: impl Into<String>) -> Error {
    Error::Constraint(msg.into())
}
