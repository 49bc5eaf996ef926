//! Error type shared by every numerical routine in the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Fractional order outside the open admissible window for the dimension.
    #[error("s = {s} is not admissible for N = {n}: require {lo} < s < {hi}")]
    Admissibility { n: usize, s: f64, lo: f64, hi: f64 },

    /// Refinement did not settle; both estimates are kept for diagnosis.
    #[error("accuracy error in {context}: coarse = {coarse:e}, fine = {fine:e}")]
    Accuracy {
        context: String,
        coarse: f64,
        fine: f64,
    },

    #[error("divergent integral: {0}")]
    Divergence(String),

    /// An asymptotic formula was requested outside the regime where it holds.
    #[error("regime error: {0}")]
    Regime(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("search failure: {0}")]
    Search(String),

    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
