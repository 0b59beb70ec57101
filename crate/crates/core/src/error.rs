use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("transfer function `{description}` returned non-finite gain at {frequency_hz} Hz")]
    NonFiniteGain {
        description: String,
        frequency_hz: f64,
    },
    #[error("length mismatch: expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("sample rate mismatch: expected {expected} Hz, got {actual} Hz")]
    RateMismatch { expected: f64, actual: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("envelope is already phase-lag compensated")]
    AlreadyCompensated,
    #[error("measurement failed: {0}")]
    Measurement(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
