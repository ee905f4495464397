use thiserror::Error;

/// Error type shared by every module in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A polynomial degree or series order above the supported maximum.
    #[error("degree {requested} exceeds supported maximum {max}")]
    DegreeExceeded { requested: usize, max: usize },

    /// A truncated series failed to meet its tolerance within the term cap.
    #[error("series did not converge within {max_terms} terms")]
    NonConvergence { max_terms: usize },

    /// An intermediate value left the representable range of f64.
    #[error("overflow in {0}")]
    Overflow(String),

    /// Inputs that must agree (rates, horizons) do not.
    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    /// A requested truncation level is too coarse for the required tolerance.
    #[error("truncation too coarse: {0}")]
    Truncation(String),

    /// A rate function exceeded its declared majorant during thinning.
    #[error("rate bound violated: rate({t}) = {value} > {bound}")]
    RateBound { t: f64, value: f64, bound: f64 },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed: {0}")]
    Integration(String),

    /// An empirical operation received no observations.
    #[error("empty sample")]
    EmptySample,

    /// Too few observations or cells for the requested statistic.
    #[error("not enough data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
