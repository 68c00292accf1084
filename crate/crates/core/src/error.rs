use thiserror::Error;

/// Errors raised by the lattice, solver and algebraic calculators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lattice must have at least 4 sites per side, got {0}")]
    LatticeTooSmall(usize),

    #[error("side length must be positive and finite, got {0}")]
    BadSideLength(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("degree {degree} too large for a lattice with {n} sites per side (need |d| <= {limit})")]
    DegreeTooLarge { degree: i64, n: usize, limit: i64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point has no zero of the moment map on its orbit: {0}")]
    Unstable(String),

    #[error("inconsistent weight data: {0}")]
    InconsistentWeights(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
