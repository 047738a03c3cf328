//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A dimension or depth exceeds a configured cap.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    /// Operands have incompatible shapes.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A caller violated an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A quantity left the representable floating-point range.
    #[error("numerical range: {0}")]
    NumericalRange(String),
    /// A schedule failed validation.
    #[error("schedule validation failed: {0}")]
    Validation(String),
    /// A config file or serialized schedule could not be parsed.
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for validation/config problems,
    /// 3 for cap violations, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Config(_) | Error::Contract(_) => 2,
            Error::CapExceeded(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
