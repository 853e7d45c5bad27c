use thiserror::Error;

/// Errors raised by the library.
///
/// The variants line up with the exit codes of the command-line front end:
/// usage problems, inputs outside the mathematical domain, resource caps,
/// and internal consistency failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit: {what} would need {predicted} items (cap {cap})")]
    Resource {
        what: &'static str,
        predicted: u128,
        cap: u128,
    },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
