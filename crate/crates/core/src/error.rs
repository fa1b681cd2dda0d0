use thiserror::Error;

/// Errors raised by the phase-space toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("wave function anchor |psi(0)| = {modulus:.3e} is below {threshold:.1e}; phase cannot be fixed at phi = 0")]
    DegenerateAnchor { modulus: f64, threshold: f64 },
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("dimension mismatch: expected n_max = {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
