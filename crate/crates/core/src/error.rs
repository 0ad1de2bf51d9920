use thiserror::Error;

/// Errors raised by grid construction, spectral operators, solvers and the
/// experiment layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grid mismatch between fields")]
    GridMismatch,

    #[error("unsupported {what}: {value}")]
    Unsupported { what: &'static str, value: String },

    #[error("overflow guard: sigma * xi_max = {exponent:.3} exceeds {cap}")]
    Overflow { exponent: f64, cap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("blow-up or instability at step {step}")]
    BlowUp { step: usize },

    #[error("outside contraction regime at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("unresolved radius: only {modes} modes above the noise floor")]
    UnresolvedRadius { modes: usize },

    #[error("hypothesis violation: {0}")]
    Hypothesis(String),

    #[error("too few points for a fit: {0} usable")]
    TooFewPoints(usize),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
