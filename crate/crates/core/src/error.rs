use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An integer lies outside the range a sieve was built for.
    #[error("{value} is outside the supported range 1..={limit}")]
    OutOfRange { value: u64, limit: u64 },

    /// A request would exceed a configured memory or enumeration budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
