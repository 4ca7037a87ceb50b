use thiserror::Error;

/// Errors surfaced by the estimators, builders and parsers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid circle map: {0}")]
    InvalidMap(String),

    #[error("invalid random system: {0}")]
    InvalidSystem(String),

    #[error("unsupported model for {operation}: {reason}")]
    UnsupportedModel {
        operation: &'static str,
        reason: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    /// A theorem hypothesis required by the requested experiment does not hold.
    #[error("hypothesis violated ({hypothesis}): {detail}")]
    Hypothesis {
        hypothesis: &'static str,
        detail: String,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("fixture self-check failed: {0}")]
    Fixture(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
