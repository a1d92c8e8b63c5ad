use std::io;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },
    #[error("bit depth mismatch: {0} vs {1}")]
    BitDepthMismatch(u8, u8),
    #[error("invalid plane: {0}")]
    InvalidPlane(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse selector {input:?}: {reason}")]
    Parse { input: String, reason: String },

    // media-io
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("unsupported chroma tag {0:?}")]
    UnsupportedChroma(String),
    #[error("truncated frame {frame}: expected {expected} bytes, got {got}")]
    TruncatedFrame {
        frame: usize,
        expected: usize,
        got: usize,
    },
    #[error("file size {size} is not a multiple of the frame size {frame_size}")]
    SizeNotMultiple { size: u64, frame_size: usize },
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("unsupported maxval {0}")]
    UnsupportedMaxval(u32),
    #[error(transparent)]
    Io(#[from] io::Error),

    // local statistics
    #[error("gaussian sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("window of size {k} at ({row}, {col}) exceeds the {height}x{width} table")]
    WindowOutOfBounds {
        row: usize,
        col: usize,
        k: usize,
        width: usize,
        height: usize,
    },
    #[error("integral engine requires a rectangular window")]
    EngineShapeMismatch,
    #[error("window of size {k} does not fit a {width}x{height} image")]
    WindowLargerThanImage { k: usize, width: usize, height: usize },

    // ssim / multiscale
    #[error("empty quality map")]
    EmptyMap,
    #[error("plane of {width}x{height} is too small to downsample")]
    TooSmall { width: usize, height: usize },
    #[error("{levels} scales need a minimum dimension of {needed}, image has {have}")]
    TooManyLevels {
        levels: usize,
        needed: usize,
        have: usize,
    },

    // color
    #[error("channel weights are degenerate (1 + alpha + beta = 0)")]
    DegenerateWeights,
    #[error("wrong color space: expected {expected}, got {got}")]
    WrongSpace {
        expected: &'static str,
        got: &'static str,
    },

    // pooling
    #[error("coefficient of variation undefined for zero mean")]
    ZeroMeanCoV,
    #[error("luminance-weighted pooling needs the reference mean map")]
    MissingLumaForLW,
    #[error("empty score series")]
    EmptySeries,

    // spatiotemporal
    #[error("gaussian windows are not supported for 3-D statistics")]
    GaussianNotSupported3D,

    // adaptation
    #[error("histogram matcher has no reference map yet")]
    NoReferenceYet,

    // eval
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("dataset: {0}")]
    Dataset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
