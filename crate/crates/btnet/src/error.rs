use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed bit stream at bit {offset}: {msg}")]
    Malformed { offset: usize, msg: String },

    #[error("dataset is inconsistent: input {input} carries both labels")]
    Inconsistent { input: String },

    #[error("seed search exhausted its budget: {0}")]
    SearchBudget(String),

    #[error("search budget exhausted: {0}")]
    Budget(String),

    #[error(
        "enumeration cap exceeded: {size} parameter vectors > cap {cap}; use the rejection sampler"
    )]
    EnumerationCap { size: u128, cap: u128 },

    #[error("rejection sampler gave up after {draws} draws (estimated acceptance {estimate:e})")]
    MaxDraws { draws: u64, estimate: f64 },

    #[error("internal construction error: {0}")]
    Internal(String),
}
