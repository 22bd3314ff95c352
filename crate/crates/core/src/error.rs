use thiserror::Error;

/// Errors raised by the geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("{op}: radius {r} outside admissible domain ({reason})")]
    Domain { op: &'static str, r: f64, reason: String },

    #[error("dimension {0} is too small (need at least {1})")]
    Dimension(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate plane: Gram determinant {gram:e} below threshold")]
    DegeneratePlane { gram: f64 },

    #[error("operator is not symmetric")]
    NotSymmetric,

    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

pub(crate) fn domain(op: &'static str, r: f64, reason: impl Into<String>) -> GeometryError {
    GeometryError::Domain {
        op,
        r,
        reason: reason.into(),
    }
}
