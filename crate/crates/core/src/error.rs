use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested combination of parameters is not supported.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The split-off measure exceeds the original measure somewhere, so the
    /// remainder is not a Lévy measure.
    #[error("decomposition invalid: remainder density negative at |x| = {x} (value {value})")]
    DecompositionInvalid { x: f64, value: f64 },

    /// The model failed validation.
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
