//! Frame-pair scoring as described by an [`SsimConfig`]: resolution
//! scaling, then single-scale, multi-scale or color SSIM, then spatial
//! pooling.

use serde::{Deserialize, Serialize};

use crate::adaptation::{box_downsample, ScalePolicy, DEFAULT_D_OVER_H};
use crate::color::{luma_of, score_color, ColorModelSpec};
use crate::config::SsimConfig;
use crate::error::{Error, Result};
use crate::model::{check_dims, ColorFrame, Plane};
use crate::multiscale::{msssim, Aggregation, MultiscaleSpec};
use crate::pooling::{pool_spatial, SpatialPooler, TemporalPooler};
use crate::ssim::{mean_of, ssim_map};
use crate::stats::{local_mean, Engine, WindowSpec};

/// Named configurations accepted by [`preset`].
pub const PRESETS: [&str; 3] = ["ssim", "enhanced", "msssim"];

/// Expands a preset name.
///
/// * `ssim`: the default configuration (rectangular 11x11 window, AM
///   pooling, no scaling).
/// * `enhanced`: luma only, rectangular 11x11 window on the integral
///   engine, stride 5, distance-over-height scaling at 3.0, CoV spatial
///   pooling and AM temporal pooling.
/// * `msssim`: the `ssim` window with the 5-scale product.
pub fn preset(name: &str) -> Result<SsimConfig> {
    match name {
        "ssim" | "default" => Ok(SsimConfig::default()),
        "enhanced" => Ok(SsimConfig {
            window: WindowSpec::rectangular(11)?.with_stride(5)?,
            engine: Engine::Integral,
            scaling: ScalePolicy::EnhancedDh {
                d_over_h: DEFAULT_D_OVER_H,
            },
            color: ColorModelSpec::LumaOnly,
            spatial_pool: SpatialPooler::Cov,
            temporal_pool: TemporalPooler::Am,
            ..SsimConfig::default()
        }),
        "msssim" => Ok(SsimConfig {
            multiscale: MultiscaleSpec::product(),
            ..SsimConfig::default()
        }),
        other => Err(Error::Parse {
            input: other.into(),
            reason: format!("unknown preset; expected one of {}", PRESETS.join(", ")),
        }),
    }
}

/// Score of one frame pair plus term means of the (scaled) luma maps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameScore {
    /// Pooled score under the configured method.
    pub score: f64,
    /// Mean of the luma quality map, whatever the pooler.
    pub mssim: f64,
    pub l_mean: f64,
    pub cs_mean: f64,
}

fn scale_pair(a: &Plane, b: &Plane, factor: usize) -> Result<(Plane, Plane)> {
    if factor == 1 {
        return Ok((a.clone(), b.clone()));
    }
    Ok((box_downsample(a, factor)?, box_downsample(b, factor)?))
}

/// Single-channel score. With multi-scale aggregation the per-scale means
/// are combined and the spatial pooler is not consulted.
pub fn score_planes(reference: &Plane, distorted: &Plane, config: &SsimConfig) -> Result<FrameScore> {
    config.validate()?;
    check_dims(reference.width(), reference.height(), distorted.width(), distorted.height())?;
    let factor = config.scaling.factor(reference.width(), reference.height());
    let (a, b) = scale_pair(reference, distorted, factor)?;
    let maps = ssim_map(&a, &b, config)?;
    let mssim = mean_of(&maps.q_map)?;
    let score = if config.multiscale.aggregation != Aggregation::Off {
        msssim(&a, &b, config, &config.multiscale)?
    } else if config.spatial_pool.needs_reference_mean() {
        let mu = local_mean(&a, &config.window, config.engine)?;
        pool_spatial(&maps.q_map, config.spatial_pool, Some(&mu))?
    } else {
        pool_spatial(&maps.q_map, config.spatial_pool, None)?
    };
    Ok(FrameScore {
        score,
        mssim,
        l_mean: mean_of(&maps.l_map)?,
        cs_mean: mean_of(&maps.cs_map)?,
    })
}

fn scale_frame(frame: &ColorFrame, factor: usize) -> Result<ColorFrame> {
    if factor == 1 {
        return Ok(frame.clone());
    }
    let [p0, p1, p2] = frame.planes();
    ColorFrame::new(
        [box_downsample(p0, factor)?, box_downsample(p1, factor)?, box_downsample(p2, factor)?],
        frame.bit_depth(),
        frame.space(),
        frame.chroma(),
    )
}

/// Scores a color frame pair. Luma-only models go through
/// [`score_planes`]; color models score the scaled frames with
/// [`score_color`] and report luma term means alongside.
pub fn score_frames(reference: &ColorFrame, distorted: &ColorFrame, config: &SsimConfig) -> Result<FrameScore> {
    check_dims(reference.width(), reference.height(), distorted.width(), distorted.height())?;
    let luma = score_planes(&luma_of(reference)?, &luma_of(distorted)?, config)?;
    if config.color.is_luma_only() {
        return Ok(luma);
    }
    let factor = config.scaling.factor(reference.width(), reference.height());
    let score = score_color(&scale_frame(reference, factor)?, &scale_frame(distorted, factor)?, config)?;
    Ok(FrameScore { score, ..luma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChromaSubsampling, ColorSpace};

    fn textured(w: usize, h: usize, seed: usize) -> Plane {
        Plane::from_fn(w, h, |x, y| ((x * 13 + y * 7 + seed) * 37 % 251) as f64).unwrap()
    }

    #[test]
    fn enhanced_preset_contents() {
        let c = preset("enhanced").unwrap();
        assert_eq!(c.window, WindowSpec::rectangular(11).unwrap().with_stride(5).unwrap());
        assert_eq!(c.engine, Engine::Integral);
        assert_eq!(c.scaling, ScalePolicy::EnhancedDh { d_over_h: 3.0 });
        assert_eq!(c.color, ColorModelSpec::LumaOnly);
        assert_eq!(c.spatial_pool, SpatialPooler::Cov);
        assert_eq!(c.temporal_pool, TemporalPooler::Am);
        assert!(preset("nope").is_err());
    }

    #[test]
    fn identical_planes() {
        let a = textured(64, 48, 3);
        let s = score_planes(&a, &a, &SsimConfig::default()).unwrap();
        assert!((s.score - 1.0).abs() < 1e-12);
        let e = score_planes(&a, &a, &preset("enhanced").unwrap()).unwrap();
        assert_eq!(e.score, 0.0);
        assert!((e.mssim - 1.0).abs() < 1e-12);
    }

    #[test]
    fn default_score_is_mssim() {
        let a = textured(40, 40, 1);
        let b = textured(40, 40, 9);
        let s = score_planes(&a, &b, &SsimConfig::default()).unwrap();
        assert_eq!(s.score, s.mssim);
    }

    #[test]
    fn color_model_on_identical_frames() {
        let p = textured(32, 32, 5);
        let f = ColorFrame::new([p.clone(), p.map(|v| 255.0 - v).unwrap(), p], 8, ColorSpace::Rgb, ChromaSubsampling::Cs444)
            .unwrap();
        let cfg = SsimConfig {
            color: "cmssim".parse().unwrap(),
            ..SsimConfig::default()
        };
        let s = score_frames(&f, &f, &cfg).unwrap();
        assert!((s.score - 1.0).abs() < 1e-9);
    }
}
