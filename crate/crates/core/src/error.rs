use thiserror::Error;

/// Error kinds shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A size or range setting is outside what the simulator supports.
    #[error("configuration error: {0}")]
    Config(String),
    /// Arguments do not fit together (dimension mismatch, missing parameter, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// The requested operation is not available for this input.
    #[error("capability error: {0}")]
    Capability(String),
    /// A non-finite value showed up during an optimization step.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Malformed text input.
    #[error("{source_name}:{line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(source_name: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
