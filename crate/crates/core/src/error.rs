//! Error type shared across the crate.

use thiserror::Error;

/// Errors surfaced by solver components.
///
/// Callback results containing NaN or infinity are reported as
/// [`Error::Evaluation`]; the outer solver converts that into the
/// `evaluation_error` solve status so a batch run can record the failure and
/// move on.  [`Error::InternalInvariant`] indicates a broken algorithmic
/// invariant (e.g. a backtracking loop that failed to terminate within its
/// cap) and is always a bug report, never an expected outcome.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector argument had the wrong length.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// An argument was outside its mathematical domain (e.g. `mu <= 0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A problem callback produced NaN or infinity.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// An algorithmic invariant failed to hold; always a bug.
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    /// Invalid configuration value.
    #[error("config error: {0}")]
    Config(String),

    /// A problem or variant name was not recognized.
    #[error("unknown name: {0}")]
    UnknownName(String),

    /// File or serialization failure while reading/writing artifacts.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
