use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("row {row}: {message}")]
    Record { row: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("no comparable pairs")]
    NoComparablePairs,

    #[error("need at least {needed} events, found {found}")]
    InsufficientEvents { needed: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate test: {0}")]
    DegenerateTest(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("covariate `{0}` is constant and cannot be inverse-scaled")]
    ConstantCovariate(String),

    #[error("unknown covariate `{0}`")]
    UnknownCovariate(String),

    #[error("all {0} bootstrap runs failed")]
    AllRunsFailed(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
