//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by constructors, samplers and fits in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// An argument fell outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The truncation point is so deep in the upper tail that the survival
    /// mass underflows and the renormalized density cannot be represented.
    #[error("truncation point {lower} leaves survival mass {mass:e} (< 1e-300)")]
    TruncationUnderflow { lower: f64, mass: f64 },

    /// The folded-approach density was evaluated exactly at its integrable
    /// singularity `n_r = -k`.
    #[error("density is singular at n_r = -k = {0}")]
    SingularAtSupportEdge(f64),

    /// A truncated-regime simulation kept zero draws.
    #[error("no simulated values survived the truncation cut")]
    EmptyBatch,

    /// The log-log fit was given fewer usable points than it needs.
    #[error("log-log fit needs at least {needed} records with positive error, got {got}")]
    TooFewRecords { needed: usize, got: usize },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
