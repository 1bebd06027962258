use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("I/O error: {0}")]
    Stream(#[from] io::Error),

    #[error("empty input")]
    EmptyInput,

    /// A content byte fell below 0x02; 0x00 and 0x01 are reserved.
    #[error("reserved byte 0x{byte:02x} at offset {offset}")]
    ReservedByte { offset: u64, byte: u8 },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("rank overflow: {0} phrases do not fit 32-bit ranks")]
    RankOverflow(usize),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("unsupported format version {found} (expected {expected})")]
    Version { found: u8, expected: u8 },

    #[error("truncated file: {0}")]
    Truncated(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
