//! Error types shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (zero dimension, empty arm set, bad bounds, …).
    #[error("configuration error: {0}")]
    Config(String),

    /// Caller violated an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// Invalid input data (empty text, non-finite reward, …).
    #[error("input error: {0}")]
    Input(String),

    /// A computation produced a non-finite value despite valid inputs.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The regression design matrix is rank deficient after dropping
    /// constant columns; lists the offending columns.
    #[error("degenerate design: dependent columns {columns:?}")]
    DegenerateDesign { columns: Vec<String> },

    /// A remote editor returned an empty or unusable completion; the caller
    /// skips the round without updating the bandit.
    #[error("edit failed: {0}")]
    EditFailed(String),

    /// A judge response could not be parsed after retries.
    #[error("judge parse error: {0}")]
    JudgeParse(String),

    /// Transport-level failure talking to a remote endpoint (retryable).
    #[error("transport error: {0}")]
    Transport(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Transport failures are worth retrying; everything else is not.
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::Transport(_))
    }
}
