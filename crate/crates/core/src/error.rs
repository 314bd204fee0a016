use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the arithmetic domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-side precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The requested computation would exceed a configured budget.
    #[error("resource limit: {what} needs ~{requested} bytes, budget is {budget}")]
    Resource {
        what: &'static str,
        requested: u64,
        budget: u64,
    },

    /// The operation is not defined for this model kind.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A result is inconclusive at the given region size.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    /// An internal consistency check failed. This is a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("cache format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors that indicate a defect rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}
