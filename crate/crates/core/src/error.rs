use thiserror::Error;

/// Errors raised by the verification kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A probability mass function violates its invariants.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
