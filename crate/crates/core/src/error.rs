use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} is out of range for a sequence of {len} vectors")]
    OutOfRange { index: usize, len: usize },

    /// Exact classification is only available for finite edits of the standard basis.
    #[error("exact classification unsupported: {0}")]
    UnsupportedExact(String),

    #[error("NotAFrame: the sequence misses {corange_dim} direction(s) of the ambient space")]
    NotAFrame { corange_dim: usize },

    #[error("unknown gallery entry `{0}`")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
