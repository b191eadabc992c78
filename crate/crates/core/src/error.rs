use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the enhancement pipeline.
#[derive(Error, Debug)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt image data: {0}")]
    CorruptData(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("expected {expected} planes, got {actual}")]
    SpaceTagMismatch {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("operation requires a 3-channel color image")]
    NotColor,

    #[error("operation requires a 1-channel grayscale image, got {0} channels")]
    NotGrayscale(usize),

    #[error("image too small: {0}")]
    ImageTooSmall(String),

    #[error("weights sum to zero")]
    ZeroWeightSum,

    #[error("local luminance is zero for a non-constant patch")]
    ZeroLuminance,

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownVariant {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
