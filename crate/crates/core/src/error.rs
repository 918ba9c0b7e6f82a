//! Error type shared by every module of the engine.
//!
//! The split mirrors how callers react: `Domain` means the request itself is
//! invalid (bad parameters, point outside the configuration space), `Resource`
//! means a configured cap would be exceeded, `NonConvergence` means an
//! iterative kernel gave up, and `Verification` means two routes that must
//! agree exactly did not.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiError {
    /// Invalid parameters or arguments outside the mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A size cap (level count, Hilbert-space dimension, enumeration budget)
    /// would be exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// An iterative algorithm exhausted its iteration budget.
    #[error("did not converge: {0}")]
    NonConvergence(String),

    /// Two independently computed results that must agree did not.
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, FiError>;

impl FiError {
    pub fn domain(msg: impl Into<String>) -> Self {
        FiError::Domain(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        FiError::Resource(msg.into())
    }

    pub fn non_convergence(msg: impl Into<String>) -> Self {
        FiError::NonConvergence(msg.into())
    }

    pub fn verification(msg: impl Into<String>) -> Self {
        FiError::Verification(msg.into())
    }
}
