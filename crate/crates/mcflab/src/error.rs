use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("field length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(&'static str),

    #[error("rescaled window [{lo}, {hi}] falls outside the recorded trajectory")]
    WindowOutOfRange { lo: f64, hi: f64 },

    #[error("record index {index} out of range for trajectory of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("tangential redistribution was active; residual checks need the pure normal flow")]
    RedistributionActive,

    #[error("mean curvature is not positive on the requested frames")]
    NonPositiveH,

    #[error("dimension n = {0} is too small; this operation requires n >= 3")]
    DimensionTooSmall(usize),

    #[error("non-positive input: {0}")]
    NonPositiveInputs(&'static str),

    #[error("trajectory too short: {0}")]
    TrajectoryTooShort(String),

    #[error("insufficient samples for the fit: have {have}, need {need}")]
    InsufficientSamples { have: usize, need: usize },

    #[error("bad shape parameters: {0}")]
    BadShapeParameters(String),

    #[error("bad configuration: {0}")]
    BadConfig(String),

    #[error("accumulator ({quantity}, alpha = {alpha}) was not registered on this trajectory")]
    MissingAccumulator { quantity: &'static str, alpha: f64 },
}
