//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by model construction, training, sampling, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (empty layer list, non-positive kernel length, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Dimension or grid mismatch between two inputs.
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    /// Training loss became non-finite and the halved-rate restart also failed.
    #[error("training diverged (non-finite loss) at epoch {epoch}")]
    TrainingDiverged { epoch: usize },

    /// Conditioning pivot below the degeneracy floor; the caller must skip it.
    #[error("degenerate pivot {index}: diagonal {value:e} below floor {floor:e}")]
    DegeneratePivot {
        index: usize,
        value: f64,
        floor: f64,
    },

    /// Prediction requested from a model that has not been trained.
    #[error("model has not been trained")]
    Untrained,

    /// Input outside the problem's admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Numerical linear algebra failure (e.g. Cholesky after jitter escalation).
    #[error("linear algebra failure: {0}")]
    Linalg(String),

    /// Degenerate statistics input (e.g. fewer than two paired samples).
    #[error("statistics error: {0}")]
    Stats(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
