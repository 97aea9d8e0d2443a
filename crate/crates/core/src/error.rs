use chrono::NaiveDate;
use thiserror::Error;

/// Errors produced anywhere in the forecasting pipeline.
#[derive(Debug, Error)]
pub enum KwfError {
    #[error("series length {len} is not a multiple of {h} (remainder {remainder})")]
    RaggedLength {
        len: usize,
        h: usize,
        remainder: usize,
    },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("group map has no entry for {0}")]
    MissingGroup(NaiveDate),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("length {len} is not dyadic")]
    NotDyadic { len: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("degenerate weights: {0}")]
    DegenerateWeights(String),
    #[error("insufficient history: need at least {required} segments, have {available}")]
    InsufficientHistory { required: usize, available: usize },
    #[error("csv row {row}: {msg}")]
    Csv { row: usize, msg: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl KwfError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        KwfError::Invalid(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, KwfError>;
