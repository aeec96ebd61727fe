use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Probability mass that does not fit below the photon-number cutoff.
    #[error("truncation error: {what} (mass {mass:.3e} beyond n_max = {n_max})")]
    Truncation {
        what: &'static str,
        mass: f64,
        n_max: usize,
    },

    #[error("step size too large: {0}")]
    StepSize(String),

    #[error("weak driving: drive = {drive} must exceed g/2 = {half_g}")]
    WeakDriving { drive: f64, half_g: f64 },

    #[error("no excited-state amplitude to emit from (<σ₊σ₋> = {0:.3e})")]
    ZeroAmplitude(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("empty ensemble")]
    EmptyEnsemble,
}
