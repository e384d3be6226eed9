use thiserror::Error;

/// Errors shared by every layer of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A root or a coefficient-level solve needs a larger ambient field.
    /// `degree` is the minimal ambient degree over F_q that suffices.
    #[error("field extension required: ambient degree {degree} over F_q")]
    ExtensionNeeded { degree: u32 },

    /// Not enough known terms to certify a result. `required` is the smallest
    /// truncation bound that would have sufficed, when it can be estimated.
    #[error("insufficient precision for {what} (required: {required})")]
    Precision { what: String, required: String },

    #[error("not invertible at the available precision: {0}")]
    NotInvertible(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn precision(what: impl Into<String>, required: impl ToString) -> Self {
        Error::Precision {
            what: what.into(),
            required: required.to_string(),
        }
    }
}
