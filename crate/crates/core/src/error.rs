use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("instantaneous frequency {freq_hz} Hz at t = {time_s} s is outside the frequency axis")]
    IfOutOfRange { time_s: f64, freq_hz: f64 },
    #[error("non-invertible grid: method `{0}` carries no reconstruction factor")]
    NonInvertibleGrid(String),
    #[error("degenerate grid: all entries are zero")]
    DegenerateGrid,
    #[error("no ground truth available: {0}")]
    NoGroundTruth(String),
    #[error("reference signal has zero energy")]
    ZeroSignal,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }
}
