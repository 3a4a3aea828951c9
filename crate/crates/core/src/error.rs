use thiserror::Error;

/// Errors raised anywhere in the construction and certification pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Bad user input (composite p, wrong parity, index out of range).
    #[error("input error: {0}")]
    Input(String),

    /// A configured size limit was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Operands that cannot be combined (conductor or dimension mismatch).
    #[error("structural error: {0}")]
    Structural(String),

    /// Mathematically undefined request, e.g. inverting zero.
    #[error("domain error: {0}")]
    Domain(String),

    /// An identity that should hold exactly did not.
    #[error("certification failure [{tag}]: {detail}")]
    Certification { tag: String, detail: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn cert(tag: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Certification {
            tag: tag.into(),
            detail: detail.into(),
        }
    }

    /// Process exit status for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Certification { .. } => 1,
            Error::Input(_) | Error::Parse(_) | Error::Io(_) => 2,
            Error::Structural(_) | Error::Domain(_) => 1,
            Error::Resource(_) => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
