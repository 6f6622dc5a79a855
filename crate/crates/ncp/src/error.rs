use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero matrix")]
    ZeroMatrix,

    #[error("non-finite input")]
    NonFiniteInput,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty singular value vector")]
    EmptySingularValues,

    #[error("column {0} has zero norm")]
    ZeroColumn(usize),

    #[error("column index {index} out of range for {cols} columns")]
    IndexOutOfRange { index: usize, cols: usize },

    #[error("insufficient rank: reached {achieved} of target {target}")]
    InsufficientRank { achieved: usize, target: usize },

    #[error("mask must contain both inliers and outliers")]
    DegenerateMask,

    #[error("degenerate outlier (psi infinite)")]
    DegenerateOutlier,

    #[error("degenerate basis (dimension 0)")]
    DegenerateBasis,

    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
