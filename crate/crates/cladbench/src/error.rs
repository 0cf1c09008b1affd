//! Crate-wide error type.

use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A record whose depth and height are both zero; dilution is undefined there.
    #[error("degenerate record: depth + height = 0, dilution is undefined")]
    DegenerateRecord,

    /// An input value violates a documented invariant.
    #[error("validation error on field `{field}`: {message}")]
    Validation {
        field: &'static str,
        message: String,
    },

    /// A file row could not be parsed.
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    /// Stored derived values disagree with recomputation.
    #[error("integrity error: {0}")]
    Integrity(String),

    /// Invalid generator or run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Invalid split request (holdout or k-fold).
    #[error("split error: {0}")]
    Split(String),

    /// An operation that needs at least one element got none.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Dimension mismatch between inputs.
    #[error("shape error: {0}")]
    Shape(String),

    /// Invalid hyperparameter in an estimator spec.
    #[error("spec error for {kind}: parameter `{name}`: {message}")]
    Spec {
        kind: String,
        name: String,
        message: String,
    },

    /// Model task does not match the requested operation.
    #[error("task error: {0}")]
    Task(String),

    /// Metric is mathematically undefined on the given inputs.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Estimator kind that is intentionally not part of the suite.
    #[error("unsupported model kind `{0}`")]
    UnsupportedKind(String),

    /// Every candidate of a randomized search failed to fit.
    #[error("search exhausted: all {count} candidates failed to fit")]
    SearchExhausted {
        count: usize,
        errors: Vec<String>,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code bucket: 2 usage, 3 data/task, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::UnsupportedKind(_) => 2,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => 4,
            _ => 3,
        }
    }
}
