use crate::types::Point;

/// Errors shared by every construction and oracle in this crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Total weight is zero, so no mean exists.
    #[error("degenerate input: total weight is zero")]
    ZeroMass,

    /// All points coincide (weighted variance is zero). The carried mean lets
    /// callers emit the exact single-point coreset instead.
    #[error("degenerate input: all points identical, weighted variance is zero")]
    ZeroVariance { mean: Point },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
