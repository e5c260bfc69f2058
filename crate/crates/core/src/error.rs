use std::io;

use thiserror::Error;

/// Failures while decoding or encoding binary PGM files.
#[derive(Debug, Error)]
pub enum PgmError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("unsupported PGM variant {0:?} (only binary P5 is supported)")]
    UnsupportedVariant(String),
    #[error("malformed PGM header: {0}")]
    MalformedHeader(&'static str),
    #[error("unsupported maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("truncated PGM payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Pgm(#[from] PgmError),
    #[error("invalid image dimensions {width}x{height} with {len} samples")]
    InvalidDimensions { width: usize, height: usize, len: usize },
    #[error("image contains a non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("region ({x0},{y0}) {w}x{h} does not fit inside a {width}x{height} image")]
    InvalidRegion {
        x0: usize,
        y0: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },
    #[error("kernel side must be odd, got {0}")]
    EvenKernel(usize),
    #[error("kernel side {side} exceeds image extent {width}x{height}")]
    KernelTooLarge { side: usize, width: usize, height: usize },
    #[error("invalid kernel parameters: {0}")]
    InvalidKernelParams(String),
    #[error("image {width}x{height} is smaller than the required {min}x{min}")]
    ImageTooSmall { width: usize, height: usize, min: usize },
    #[error("noise standard deviation must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("region {0}x{1} is too small for structure-tensor estimation")]
    DegenerateRegion(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
