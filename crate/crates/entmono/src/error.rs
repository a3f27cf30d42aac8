//! Crate-wide error type with the exit-code mapping used by the CLI.

use thiserror::Error;

/// Failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Unreadable or unparseable input (bad file, malformed JSON, bad flag
    /// combinations). CLI exit code 2.
    #[error("input error: {0}")]
    Input(String),

    /// Structurally valid input that fails a physical contract (norm, trace,
    /// Hermiticity, positivity, dimension mismatch). CLI exit code 3.
    #[error("validation error: {0}")]
    Validation(String),

    /// Internal numerical failure (non-convergent factorization, violated
    /// reconstruction invariant, cross-check mismatch). CLI exit code 3.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Process exit code for this error. Code 4 (inequality violation) is not
    /// an `Error`; commands return it as a status.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 2,
            Error::Validation(_) | Error::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
