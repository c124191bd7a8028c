//! Error type shared by every module of the crate.

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum QsError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator factor vanished (or came within the pole guard of zero).
    #[error("singular parameters: factor {factor} vanishes at index {index}")]
    Singular { factor: String, index: i64 },

    /// A truncated sum did not meet its convergence criterion.
    #[error("truncation failure in {what}: partial value {partial}")]
    Truncation { what: String, partial: C64 },

    /// The request exceeds a built-in size guard.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

impl QsError {
    pub fn singular(factor: impl Into<String>, index: i64) -> Self {
        QsError::Singular { factor: factor.into(), index }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        QsError::Domain(msg.into())
    }

    /// True for errors caused by non-generic parameters.
    pub fn is_singular(&self) -> bool {
        matches!(self, QsError::Singular { .. })
    }
}

pub type Result<T> = std::result::Result<T, QsError>;
