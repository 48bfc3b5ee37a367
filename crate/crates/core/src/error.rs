use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("truncation insufficient: {0}")]
    Truncation(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("sector dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: u64, cap: u64 },
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("rejection sampler exhausted {attempts} attempts with {accepted} accepted")]
    AttemptsExhausted { attempts: u64, accepted: u64 },
}

impl Error {
    /// Argument-shaped errors map to CLI exit code 2, numerical ones to 3.
    pub fn is_argument_error(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::InvalidArgument(_) | Error::DimensionOverflow { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
