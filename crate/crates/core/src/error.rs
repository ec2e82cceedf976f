use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed Standard MIDI File data.
    #[error("SMF parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unsupported SMF format {0} (only formats 0 and 1 are read)")]
    UnsupportedFormat(u16),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A metric that is not defined for the given input (too few onsets, no hits, ...).
    #[error("metric `{0}` is undefined for this input")]
    UndefinedMetric(&'static str),

    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("frame rate mismatch: {0} fps vs {1} fps")]
    FpsMismatch(u32, u32),

    #[error("simulation fault: {0}")]
    SimulationFault(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn input(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}
