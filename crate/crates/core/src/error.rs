use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image of {width}x{height} pixels is smaller than one {side}x{side} elemental region")]
    ImageTooSmall { width: usize, height: usize, side: usize },

    #[error("field of {width}x{height} is too small for box counting (need at least {min}x{min})")]
    InsufficientData { width: usize, height: usize, min: usize },

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("no elemental region passed the seed threshold")]
    NoSeeds,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("override `{arg}`: {reason}")]
    Override { arg: String, reason: String },

    #[error("label map has unlabeled pixel at ({x}, {y})")]
    UnlabeledPixel { x: usize, y: usize },

    #[error("too many regions ({0}) for a 16-bit label map")]
    TooManyRegions(usize),

    #[error("failed to decode {path}: {source}")]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("failed to write {path}: {source}")]
    Encode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the command-line tool.
    ///
    /// 2 covers bad input (undecodable images, bad parameters, mismatched
    /// dimensions), 3 the no-seed condition and 4 filesystem failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoSeeds => 3,
            Error::Io { .. } | Error::Encode { .. } => 4,
            _ => 2,
        }
    }

    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
