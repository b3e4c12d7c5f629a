use thiserror::Error;

/// Errors surfaced by the exact pipeline, the numeric oracle, and the search.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// A stated precondition of the operation does not hold.
    #[error("{0}")]
    Precondition(String),

    /// Polynomial division by the zero polynomial.
    #[error("division by zero polynomial")]
    ZeroDivisor,

    /// Exact polynomial division requested but the divisor does not divide.
    #[error("not divisible: {0}")]
    NotDivisible(String),

    /// A condition that is mathematically guaranteed failed; indicates a bug.
    #[error("internal consistency error: {0}")]
    Internal(String),

    /// Quadrature ran out of subdivision budget before reaching the target.
    /// Carries the best estimate obtained and the achieved error bound.
    #[error("quadrature accuracy target not reached: best estimate {estimate}, error bound {error_bound:e}")]
    Accuracy { estimate: f64, error_bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
