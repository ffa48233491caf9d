use std::path::PathBuf;

use thiserror::Error;

use crate::sector_model::SectorId;

/// Errors raised by the estimation, analytics and file-handling layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient data: need at least {required} observations, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error("degenerate series '{0}': weighted variance is zero")]
    DegenerateSeries(String),

    #[error("degenerate factor: {0} volatility must be positive")]
    DegenerateFactor(&'static str),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("no sector statistics for {0}")]
    MissingSector(SectorId),

    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: u64, message: String },

    #[error("{}:{line}: date {date} does not follow the previous row", path.display())]
    NonMonotonicDates { path: PathBuf, line: u64, date: String },

    #[error("{}: missing column '{column}'", path.display())]
    MissingColumn { path: PathBuf, column: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
