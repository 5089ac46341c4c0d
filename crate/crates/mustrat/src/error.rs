use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the engines. Validation problems (bad input data) are
/// kept apart from engine failures so the CLI can map them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("non-isolated singularity detected: {0}")]
    NonIsolated(String),

    #[error("genericity exhausted after {attempts} draws: {msg}")]
    GenericityExhausted { attempts: usize, msg: String },

    #[error("unsupported stratum closure: {0}")]
    UnsupportedClosure(String),

    #[error("engine error: {0}")]
    Engine(String),

    #[error("cross-engine disagreement: {0}")]
    Disagreement(String),
}

impl Error {
    pub fn engine<S: Into<String>>(msg: S) -> Self {
        Error::Engine(msg.into())
    }
    pub fn validation<S: Into<String>>(msg: S) -> Self {
        Error::Validation(msg.into())
    }
}
