//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameters outside the region where the construction makes sense.
    #[error("domain error: {0}")]
    Domain(String),
    /// The Stieltjes procedure broke down.
    #[error("recurrence coefficient computation failed at index {index}: {msg}")]
    Recurrence { index: usize, msg: String },
    /// A non-positive pivot showed up during a Cholesky-type factorisation.
    #[error("matrix is not positive definite (pivot {index}, value {value:e})")]
    NotPositiveDefinite { index: usize, value: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An adaptive expansion ran out of room.
    #[error("expansion did not converge{}: {msg}", element.map(|e| format!(" on element {e}")).unwrap_or_default())]
    NoConvergence { element: Option<usize>, msg: String },
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
