use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Fock cutoff must be at least 2, got {0}")]
    CutoffTooSmall(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("operator has no qubit/oscillator structure")]
    Unstructured,

    #[error("eigensolver failed to converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("eigenpair residual {residual:e} exceeds threshold {threshold:e}")]
    ResidualTooLarge { residual: f64, threshold: f64 },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("cutoff ceiling {ceiling} reached before convergence (last change {last_change:e}, tol {tol:e})")]
    CutoffCeiling {
        ceiling: usize,
        last_change: f64,
        tol: f64,
    },

    #[error("positive-work bound does not exist: requires R > 1 and T_h/T_c > R (R = {ratio_freq}, T_h/T_c = {ratio_temp})")]
    NoPositiveWorkRegion { ratio_freq: f64, ratio_temp: f64 },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

impl Error {
    /// True for errors caused by the configuration rather than the numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Self::Config { .. } | Self::UnknownPreset(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
