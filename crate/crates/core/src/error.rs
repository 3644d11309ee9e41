use alloc::string::String;

/// Errors raised by the geometric routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("point outside the chart domain: {0}")]
    Domain(String),
    #[error("metric is singular or not positive definite at the sample point")]
    SingularMetric,
    #[error("degenerate plane: tangent vectors are linearly dependent")]
    DegeneratePlane,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("profile construction rejected: {0}")]
    Profile(String),
}

pub type Result<T> = core::result::Result<T, GeomError>;
