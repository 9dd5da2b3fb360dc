//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The QL iteration failed to converge within the sweep budget.
    #[error("eigenvalue iteration failed to converge at index {index} after {sweeps} sweeps")]
    NoConvergence { index: usize, sweeps: usize },

    /// Truncation removed (almost) all variance, so rescaling is meaningless.
    #[error("degenerate truncation: variance of the clipped entry is {sigma_sq}")]
    DegenerateTruncation { sigma_sq: f64 },

    /// Malformed experiment configuration (file or flags).
    #[error("config error: {0}")]
    Config(String),

    /// A replayed manifest did not reproduce the recorded outputs.
    #[error("manifest mismatch: {0}")]
    ManifestMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
