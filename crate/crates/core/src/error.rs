use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    /// A precondition of the requested operation does not hold.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The least-squares design matrix is too ill-conditioned to trust.
    #[error("degenerate fit: {0}")]
    FitDegenerate(String),

    /// A numerical routine failed to reach its accuracy target.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// A binary grid file is malformed.
    #[error("bad grid file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Returns an [`LabError::InvalidInput`] unless `cond` holds.
macro_rules! ensure_input {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::LabError::InvalidInput(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure_input;
