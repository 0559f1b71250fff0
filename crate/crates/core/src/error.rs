use thiserror::Error;

/// Errors raised by the geometry, flow and reporting layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("projective dimension n = {0} is too small (need n >= 2)")]
    DimensionTooSmall(usize),

    #[error("vectors are linearly dependent (Gram determinant {0:e})")]
    DependentVectors(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("spectrum needs at least {needed} principal curvatures, got {got}")]
    SpectrumTooShort { needed: usize, got: usize },

    #[error("spectrum is not pinched: {0}")]
    NotPinched(String),

    #[error("W = alpha H^2 + beta = {0:e} is not positive")]
    NonPositiveWeight(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("radius {r} outside the family domain ({lo}, {hi})")]
    OutsideDomain { r: f64, lo: f64, hi: f64 },

    #[error("Riccati solution crosses a pole before r = {0}")]
    PoleCrossing(f64),

    #[error("mean curvature {0:e} is not positive at the initial radius")]
    NonPositiveMeanCurvature(f64),

    #[error("time {t} is at or beyond the comparison blow-up time {blowup}")]
    BeyondBlowup { t: f64, blowup: f64 },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("trajectory has {0} samples, need at least 3")]
    InsufficientSamples(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
