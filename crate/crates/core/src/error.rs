use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector or matrix dimensions disagree.
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    /// A NaN or infinity reached a kernel that requires finite input.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// An operation was invoked in the wrong lifecycle state.
    #[error("invalid state: {0}")]
    State(String),

    /// Configuration value rejected.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed input data (CSV, expression, model file).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    /// Every training attempt ended without an acceptable model.
    #[error("training did not converge after {} attempt(s)", .0.len())]
    NotConverged(Vec<crate::training::AttemptReport>),

    #[error("model file version `{found}` is not supported (expected `{expected}`)")]
    Version { found: String, expected: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
