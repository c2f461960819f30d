use std::path::PathBuf;

use crate::linalg::PartialEig;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("entry ({row}, {col}) is outside a {nrows}x{ncols} matrix")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive definite (pivot {pivot})")]
    IndefiniteMatrix { pivot: usize },

    #[error("Lanczos did not converge after {iterations} steps")]
    LanczosNotConverged {
        iterations: usize,
        best: Box<PartialEig>,
    },

    #[error("PSQMR broke down after {iterations} iterations")]
    PsqmrBreakdown { iterations: usize, x: Vec<f64> },

    #[error("Schur complement {value:e} is too close to zero")]
    DegenerateSchur { value: f64 },

    #[error("both classes must be present (found {positives} positive, {negatives} negative)")]
    SingleClass { positives: usize, negatives: usize },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported model format version {found} (expected {expected})")]
    ModelVersion { found: i64, expected: i64 },

    #[error("malformed model file: {0}")]
    ModelSchema(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
