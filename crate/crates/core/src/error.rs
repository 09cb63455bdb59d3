//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration or constructor argument violates its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation was called outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Moments describe a degenerate (zero-variance) distribution.
    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    /// An iterative solver failed to converge within its iteration budget.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A closed-form evaluation produced a value outside its provable range
    /// by more than the rounding tolerance. Indicates a bug, not bad input.
    #[error("internal consistency: {0}")]
    Inconsistency(String),

    /// Paired inputs have mismatched lengths.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// Scenario config text could not be parsed.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
