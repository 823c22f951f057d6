use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed csv at line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("target column `{0}` not found in header")]
    MissingTarget(String),
    #[error("non-numeric value `{value}` at line {line}, column `{column}`")]
    NonNumeric {
        line: u64,
        column: String,
        value: String,
    },
    #[error("non-finite value at line {line}, column `{column}`")]
    NonFinite { line: u64, column: String },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("unknown synthetic problem `{0}`")]
    UnknownProblem(String),
    #[error("attribute index {index} out of range for {d} attributes")]
    AttributeOutOfRange { index: usize, d: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular normal equations; use a ridge penalty lambda > 0")]
    SingularSystem,
    #[error("metric undefined: {0}")]
    Metric(String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("individual has not been fitted")]
    Unfitted,
    #[error("model document: {0}")]
    Document(String),
}
