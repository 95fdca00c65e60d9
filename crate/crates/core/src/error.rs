use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A stretch tensor whose third invariant is not strictly positive.
    #[error("invalid stretch: I3 = {i3} must be positive")]
    InvalidStretch { i3: f64 },

    /// Cholesky factorization failed for every jitter level that was tried.
    #[error("covariance matrix is ill-conditioned; factorization failed with jitter ladder {jitter_ladder:?}")]
    IllConditioned { jitter_ladder: Vec<f64> },

    #[error("hyperparameter optimization failed on all {restarts} restarts: {diagnostics}")]
    OptimizationFailed { restarts: usize, diagnostics: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("unsupported model format version {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
