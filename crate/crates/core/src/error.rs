use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("number of modes must be at least 1, got {0}")]
    NonPositiveN(i64),

    #[error("{field}: expected {expected} entries, got {got}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{field} contains a non-finite value")]
    NonFiniteParameter { field: &'static str },

    #[error("quadrature generator has an imaginary residual of {residual:e}")]
    ImaginaryResidual { residual: f64 },

    #[error("eigensolver failed to converge: {0}")]
    EigensolverFailure(&'static str),

    #[error("rank at threshold {threshold:e} is ambiguous: singular value {singular_value:e} is within a factor of 10")]
    RankAmbiguity {
        threshold: f64,
        singular_value: f64,
    },

    #[error("no spectral transition in [{lo}, {hi}]")]
    NoTransition { lo: f64, hi: f64 },

    #[error("thermal occupancy of mode {mode} is negative ({value})")]
    NegativeOccupancy { mode: usize, value: f64 },

    #[error("propagator would overflow: growth exponent {exponent:.1} exceeds {limit}")]
    OverflowRisk { exponent: f64, limit: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("times must be sorted ascending (index {index})")]
    UnsortedTimes { index: usize },

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    AsymmetricInput { asymmetry: f64 },

    #[error("value {value} outside ({lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("polynomial fit residual {residual:e} exceeds {limit:e}")]
    FitResidualTooLarge { residual: f64, limit: f64 },

    #[error("series needs {needed} coefficients, only {available} available")]
    MissingCoefficients { needed: usize, available: usize },

    #[error("log of nu_minus at phi = 0 vanishes (t = {t})")]
    DivisionByZeroLog { t: f64 },

    #[error("covariance matrix is not bona fide (min eigenvalue of sigma + i Omega = {min_eigenvalue:e})")]
    NotBonaFide { min_eigenvalue: f64 },

    #[error("c_{index} differs by {relative:e} (relative) between N = {n} and N = {}", n - 1)]
    InconsistentCoefficients {
        index: usize,
        n: usize,
        relative: f64,
    },

    #[error("need at least {min} modes, got {got}")]
    TooFewModes { min: usize, got: usize },

    #[error("fit did not converge: {0}")]
    FitFailure(String),
}

impl Error {
    /// True for errors caused by invalid input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveN(_)
                | Error::LengthMismatch { .. }
                | Error::NonFiniteParameter { .. }
                | Error::NegativeOccupancy { .. }
                | Error::DimensionMismatch { .. }
                | Error::UnsortedTimes { .. }
                | Error::InvalidBipartition(_)
                | Error::AsymmetricInput { .. }
                | Error::OutOfRange { .. }
                | Error::MissingCoefficients { .. }
                | Error::TooFewModes { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
