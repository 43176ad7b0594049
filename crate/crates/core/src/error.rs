use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter is outside its documented range.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Instance data failed validation.
    #[error("invalid input: {0}")]
    Input(String),
    /// The instance or a DP table exceeds a configured cap.
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
    /// No collection satisfies the requested constraints.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// A backend broke its contract.
    #[error("backend failure: {0}")]
    Backend(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn too_large<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::TooLarge(msg.into()))
}
