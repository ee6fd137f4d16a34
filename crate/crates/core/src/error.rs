use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything the library can refuse to do.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("index {index} out of range for alphabet of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("multiplication budget of {limit} exceeded at depth {depth}; largest feasible depth is {feasible}")]
    BudgetExceeded {
        limit: u64,
        depth: usize,
        feasible: usize,
    },
    #[error("degenerate splitting: {0}")]
    DegenerateSplitting(String),
    #[error("singular matrix")]
    Singular,
    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),
    #[error("set is not normalized: coarse growth estimate {estimate} is not within 20% of 1")]
    NotNormalized { estimate: f64 },
    #[error("ambiguous exponent classification at index {index}: slope {slope}")]
    Ambiguous { index: usize, slope: f64 },
    #[error("graph has no cycle")]
    NoCycle,
    #[error("graph has no path of length {0}")]
    NoPath(usize),
    #[error("invariant violated: {0}")]
    Invariant(String),
}
