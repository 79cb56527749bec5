//! Error type shared across the crate.

/// Errors reported by distribution, generating-function, and test routines.
///
/// Divergent integrals get their own variant: a generating function whose
/// defining integral does not converge (e.g. a Pareto tail too heavy for the
/// requested order) is a property of the input, not a numerical failure, and
/// callers are expected to tell the two apart.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An evaluation point is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sample violates a construction invariant.
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    /// The defining integral diverges for the given distribution and order.
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed to converge: estimate {estimate}, error bound {error_bound}")]
    QuadratureFailed { estimate: f64, error_bound: f64 },

    /// A configuration value for a test or study is invalid.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
