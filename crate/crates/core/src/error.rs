use thiserror::Error;

/// Errors raised while constructing parameters or verifying separation properties.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The sign oracle could not separate an expression from zero within its budget.
    #[error("undecided after {depth} refinement levels: sign of {expr}")]
    Undecided { depth: usize, expr: String },

    /// A refinement step produced an empty parameter interval.
    #[error("empty refinement at level {level}")]
    EmptyRefinement { level: usize },

    /// The driving sequence has no bit for the requested step.
    #[error("driving sequence exhausted at step {step}")]
    SequenceExhausted { step: usize },

    #[error("symbol {symbol} out of range for an alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },

    #[error("words have unequal lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid interval: lo {lo} is not below hi {hi}")]
    InvalidInterval { lo: String, hi: String },

    #[error("level {requested} not available (have {available})")]
    LevelOutOfRange { requested: usize, available: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
