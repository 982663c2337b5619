use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// The requested problem exceeds the configured memory budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// A numerical routine failed to converge or produced unusable output.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// The request needs a code path that is not enabled for this input.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! param_err {
    ($($arg:tt)*) => {
        $crate::error::Error::Parameter(format!($($arg)*))
    };
}

pub(crate) use param_err;
