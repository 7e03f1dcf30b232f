//! Error type shared by the core modules.

use alloc::string::String;

/// Errors produced by core operations.
///
/// `InvalidArgument` marks caller mistakes (out-of-range rotation index,
/// odd encoding dimension, empty inputs). `Validation` marks inconsistent
/// data discovered while cross-checking structures (dangling passage ids,
/// mixed vector dimensions). `DimensionMismatch` is the special case of
/// incompatible tensor widths.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidArgument(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CoreError::Validation(msg.into())
    }
}
