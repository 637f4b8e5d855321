use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fractional order {alpha} is outside the admissible window {window}")]
    InvalidOrder { alpha: f64, window: &'static str },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("gamma function has a pole at {0}")]
    GammaPole(f64),

    #[error("hypergeometric parameter c = {0} is a non-positive integer")]
    InvalidHypergeometricParameter(f64),

    #[error("point x = {x} lies outside the open interval (-{half_width}, {half_width})")]
    OutsideDomain { x: f64, half_width: f64 },

    #[error("non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("grid mismatch: operator grid has {expected} cells on half-width {expected_half_width}, field grid has {found} cells on half-width {found_half_width}")]
    GridMismatch {
        expected: usize,
        expected_half_width: f64,
        found: usize,
        found_half_width: f64,
    },

    #[error("horizon {delta} is smaller than the grid spacing {spacing}")]
    HorizonTooSmall { delta: f64, spacing: f64 },

    #[error("horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),

    #[error("symmetric eigensolver failed to converge (n = {size}, Frobenius norm {norm:.3e})")]
    EigenNoConvergence { size: usize, norm: f64 },

    #[error("matrix power {power} is undefined: eigenvalue {eigenvalue} is not positive")]
    NonPositiveEigenvalue { power: f64, eigenvalue: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid evolution times: {0}")]
    InvalidTimes(String),

    #[error("mode index {k} outside 1..={max}")]
    ModeOutOfRange { k: usize, max: usize },

    #[error("adaptive quadrature on [{a}, {b}] exceeded its refinement budget (error estimate {estimate:.3e})")]
    QuadratureBudget { a: f64, b: f64, estimate: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
