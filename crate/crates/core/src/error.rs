use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Schatten exponent must satisfy p >= 1, got {0}")]
    SchattenExponent(f64),

    #[error("coefficient extraction is ill-conditioned: samples overflow at radius scale {condition:.3e}")]
    IllConditioned { condition: f64 },

    #[error("coefficient matrix violates Hermitian symmetry by {asymmetry:.3e} (tolerance {tolerance:.3e})")]
    HermitianViolation { asymmetry: f64, tolerance: f64 },

    #[error("coefficient matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.6e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("eigensolver failed to converge on a {dim}x{dim} matrix (norm {norm:.3e})")]
    EigenSolver { dim: usize, norm: f64 },

    #[error("symbol needs {needed} coefficients for this truncation, only {available} given")]
    InsufficientCoefficients { needed: usize, available: usize },

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("characteristic function is undefined at lambda = 0")]
    ZeroLambda,
}

pub type Result<T> = std::result::Result<T, Error>;
