//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps these onto its exit-code contract: [`Error::Config`] and
/// [`Error::Data`] are user-input problems (exit 2), everything else is a
/// runtime failure (exit 1).
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or argument values (bad target size, bad
    /// fraction, inconsistent dimensions requested by the caller).
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or unusable input data (missing file, non-numeric cell,
    /// non-finite value, degenerate dataset).
    #[error("data error: {0}")]
    Data(String),

    /// Shape mismatch between tensors/vectors at an API boundary.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Numerical failure during training or optimization (non-finite loss
    /// or gradient, non-convergence).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// I/O failure writing outputs.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True when the error stems from user-provided configuration or input
    /// data rather than a runtime failure.
    pub fn is_user_error(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Data(_))
    }
}
