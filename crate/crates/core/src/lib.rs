//! Full-reference SSIM toolkit.
//!
//! Rectangular and Gaussian windows over the valid region, O(1)-per-window
//! statistics from summed-area tables, multi-scale and spatio-temporal
//! variants, color models, spatial and temporal pooling, resolution
//! adaptation and subjective-score evaluation.
//!
//! ```
//! use ssimkit::{ssim_map, mssim, Plane, SsimConfig};
//!
//! let a = Plane::from_fn(32, 32, |x, y| ((x * 7 + y * 3) % 256) as f64).unwrap();
//! let cfg = SsimConfig::default();
//! let score = mssim(&ssim_map(&a, &a, &cfg).unwrap()).unwrap();
//! assert!((score - 1.0).abs() < 1e-12);
//! ```

pub mod adaptation;
pub mod color;
pub mod config;
pub mod error;
pub mod eval;
pub mod io;
pub mod model;
pub mod multiscale;
pub mod pipeline;
pub mod pooling;
mod selector;
pub mod spatiotemporal;
pub mod ssim;
pub mod stats;

pub use config::SsimConfig;
pub use error::{Error, Result};
pub use model::{
    grid_len, peak_value, validate_frame_pair, ChromaSubsampling, ColorFrame, ColorSpace, LumaPlane, Plane,
    QualityMap, ScoreSeries,
};
pub use multiscale::{msssim, MultiscaleSpec};
pub use pipeline::{preset, score_frames, score_planes, FrameScore};
pub use pooling::{pool_spatial, pool_temporal, SpatialPooler, TemporalPooler};
pub use ssim::{mssim, ssim_map, SsimTermMaps};
pub use stats::{Engine, WindowSpec};
