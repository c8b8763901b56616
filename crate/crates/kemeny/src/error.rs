use thiserror::Error;

/// Errors shared by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Paired operations require samples of equal length.
    #[error("sample lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// The operation needs at least `min` observations.
    #[error("sample of length {len} is too short (need at least {min})")]
    TooShort { len: usize, min: usize },

    /// NaN observations are rejected at construction; +/-inf is allowed.
    #[error("NaN observation at index {index}")]
    NanInput { index: usize },

    /// A statistic is undefined for this input, e.g. a constant sample
    /// or a pooled concentration that is not strictly positive.
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    /// A parameter sits outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exhaustive enumeration of n^n - n vectors was refused.
    #[error("population for n = {n} has {cardinality} members, above the n <= {max} guard")]
    EnumerationTooLarge {
        n: usize,
        max: usize,
        cardinality: u128,
    },

    /// Resampling needs enough replicates for stable tail quantiles.
    #[error("{got} replicates requested, need at least {min}")]
    InsufficientReplicates { got: u64, min: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
