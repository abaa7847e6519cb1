use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("true channel has zero norm")]
    ZeroChannel,

    #[error("unknown estimator `{0}`")]
    UnknownEstimator(String),

    #[error("unknown complexity scheme `{0}`")]
    UnknownScheme(String),

    #[error("bad dataset magic {0:02x?}")]
    BadMagic([u8; 4]),

    #[error("unsupported dataset version {0}")]
    UnsupportedVersion(u16),

    #[error("dataset header truncated")]
    TruncatedHeader,

    #[error("dataset truncated: header declares {expected} samples, payload holds {complete}")]
    Truncated { expected: u64, complete: u64 },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
