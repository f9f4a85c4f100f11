use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum GpcpError {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite entry at flat index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("projection is not available for a halfspace-represented dual cone")]
    ProjectionUnsupported,

    #[error("operation is defined only for the nonnegative orthant cone")]
    UnsupportedCone,

    #[error("positive definiteness is undefined for odd tensor order {order}")]
    OddOrder { order: usize },

    #[error("reference point is not a solution: residual diagnostics {residual:.3e} exceed tolerance {tol:.3e}")]
    NotASolution { residual: f64, tol: f64 },

    #[error("solution set estimate is empty")]
    EmptySolutionEstimate,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GpcpError>;
