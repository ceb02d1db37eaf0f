use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum CoreError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("degenerate alignment rate: influence vanishes at twice the flock radius")]
    DegenerateRate,

    #[error("curve start offset too large: local truncation {estimate:.3e} exceeds {tolerance:.3e}")]
    Refinement { estimate: f64, tolerance: f64 },

    #[error("paths crossed at t = {time:.6e} near r = {radius:.6e}")]
    Crossing { time: f64, radius: f64 },
}

pub type Result<T> = std::result::Result<T, CoreError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> CoreError {
    CoreError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
