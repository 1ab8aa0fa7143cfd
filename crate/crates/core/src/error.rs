use thiserror::Error;

/// Errors produced by the spectral routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid slope: {0}")]
    InvalidSlope(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A partial quotient could not be certified from the stored digits.
    #[error("precision exhausted after {certified} certified partial quotients")]
    PrecisionExhausted { certified: usize },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("too many eigenvalues: {count} exceeds the limit of {limit}")]
    TooManyEigenvalues { count: u64, limit: u64 },

    /// The requested point lies past the construction cap of a truncated step function.
    #[error("lambda {lambda} exceeds the validity cap {cap} of the distribution function")]
    BeyondCap { lambda: f64, cap: f64 },

    #[error("the adiabatic trace limit is only available for irrational slopes")]
    RationalSlope,

    #[error("Laplace transform diverges: t = {t} must exceed the growth rate {growth}")]
    Divergent { t: f64, growth: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    QuadratureFailed { tolerance: f64, estimate: f64 },

    #[error("cannot serialize: {0}")]
    Unserializable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
