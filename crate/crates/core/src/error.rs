use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    /// The requested quantity does not exist for these parameters
    /// (extreme crossover, binary alphabet, ...).
    #[error("inapplicable: {0}")]
    Inapplicable(String),

    #[error("slope formula degenerate at origin")]
    DegenerateSlope,

    #[error("tightness claim applies only below R_c (got R = {rate}, R_c = {critical})")]
    OutsideTightnessRegime { rate: f64, critical: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}
