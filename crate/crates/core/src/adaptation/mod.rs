//! Resolution and viewing-distance adaptation, and scaled-SSIM prediction.

mod histogram;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use histogram::{HistogramMatcher, HISTOGRAM_BINS, DEFAULT_REFRESH};

use crate::error::{Error, Result};
use crate::model::Plane;
use crate::selector::{self, Selector};

/// Reference height of the 256-line rule.
pub const REFERENCE_LINES: f64 = 256.0;
/// Default viewing distance over display height.
pub const DEFAULT_D_OVER_H: f64 = 3.0;
pub const DEFAULT_THETA_H: f64 = 40.0;
pub const DEFAULT_THETA_W: f64 = 50.0;

/// How frames are downsampled before scoring.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ScalePolicy {
    None,
    /// `max(1, round(min(W, H) / 256))`, or the ceiling when `ceil` is set.
    Legacy256 { ceil: bool },
    /// Self-adaptive scale transform for a display of `display_h` by
    /// `display_w` viewed from `distance` (same units), angles in degrees.
    Sast {
        display_h: f64,
        display_w: f64,
        distance: f64,
        theta_h: f64,
        theta_w: f64,
    },
    EnhancedDh { d_over_h: f64 },
}

impl ScalePolicy {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            ScalePolicy::Sast {
                display_h,
                display_w,
                distance,
                theta_h,
                theta_w,
            } => {
                positive("display height", display_h)?;
                positive("display width", display_w)?;
                positive("viewing distance", distance)?;
                positive("theta_h", theta_h)?;
                positive("theta_w", theta_w)?;
                if theta_h >= 180.0 || theta_w >= 180.0 {
                    return Err(Error::InvalidParameter("viewing angles must be below 180".into()));
                }
                Ok(())
            }
            ScalePolicy::EnhancedDh { d_over_h } => positive("d_over_h", d_over_h),
            _ => Ok(()),
        }
    }

    /// Integer downsampling factor for a `width x height` frame.
    pub fn factor(&self, width: usize, height: usize) -> usize {
        match *self {
            ScalePolicy::None => 1,
            ScalePolicy::Legacy256 { ceil: false } => legacy_scale_factor(width, height),
            ScalePolicy::Legacy256 { ceil: true } => legacy_scale_factor_ceil(width, height),
            ScalePolicy::Sast {
                display_h,
                display_w,
                distance,
                theta_h,
                theta_w,
            } => {
                let z = sast_factor_with_angles(display_h, display_w, distance, theta_h, theta_w);
                (z.round() as usize).max(1)
            }
            ScalePolicy::EnhancedDh { d_over_h } => enhanced_scale_factor(width, height, d_over_h),
        }
    }

    /// Downsamples `plane` by this policy's factor.
    pub fn apply(&self, plane: &Plane) -> Result<Plane> {
        box_downsample(plane, self.factor(plane.width(), plane.height()))
    }
}

impl fmt::Display for ScalePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalePolicy::None => write!(f, "none"),
            ScalePolicy::Legacy256 { ceil: false } => write!(f, "legacy"),
            ScalePolicy::Legacy256 { ceil: true } => write!(f, "legacy-ceil"),
            ScalePolicy::Sast {
                display_h,
                display_w,
                distance,
                theta_h,
                theta_w,
            } => write!(f, "sast:h={display_h},w={display_w},d={distance},th={theta_h},tw={theta_w}"),
            ScalePolicy::EnhancedDh { d_over_h } => write!(f, "dh:{d_over_h}"),
        }
    }
}

impl FromStr for ScalePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sel = Selector::parse(s)?;
        let policy = match sel.name.as_str() {
            "none" => {
                sel.expect_no_args()?;
                ScalePolicy::None
            }
            "legacy" => {
                sel.expect_no_args()?;
                ScalePolicy::Legacy256 { ceil: false }
            }
            "legacy-ceil" => {
                sel.expect_no_args()?;
                ScalePolicy::Legacy256 { ceil: true }
            }
            "sast" => {
                sel.check_keys(&["h", "w", "d", "th", "tw"])?;
                if !sel.positional.is_empty() {
                    return Err(selector::bad(s, "sast takes h=, w=, d= and optional th=, tw="));
                }
                ScalePolicy::Sast {
                    display_h: sel.req_f64("h")?,
                    display_w: sel.req_f64("w")?,
                    distance: sel.req_f64("d")?,
                    theta_h: sel.opt_f64("th")?.unwrap_or(DEFAULT_THETA_H),
                    theta_w: sel.opt_f64("tw")?.unwrap_or(DEFAULT_THETA_W),
                }
            }
            "dh" => {
                sel.check_keys(&[])?;
                let d = if sel.positional.is_empty() {
                    DEFAULT_D_OVER_H
                } else {
                    sel.positional_f64(0)?
                };
                ScalePolicy::EnhancedDh { d_over_h: d }
            }
            other => return Err(selector::unknown(s, other)),
        };
        policy.validate()?;
        Ok(policy)
    }
}

impl TryFrom<String> for ScalePolicy {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ScalePolicy> for String {
    fn from(p: ScalePolicy) -> String {
        p.to_string()
    }
}

fn min_dim(width: usize, height: usize) -> f64 {
    width.min(height) as f64
}

/// `max(1, round(min(W, H) / 256))`, rounding half away from zero.
pub fn legacy_scale_factor(width: usize, height: usize) -> usize {
    ((min_dim(width, height) / REFERENCE_LINES).round() as usize).max(1)
}

/// `max(1, ceil(min(W, H) / 256))`.
pub fn legacy_scale_factor_ceil(width: usize, height: usize) -> usize {
    ((min_dim(width, height) / REFERENCE_LINES).ceil() as usize).max(1)
}

/// `max(1, round((min(W, H) / 256) (3 / d_over_h)))`. Equals the legacy
/// factor at the default ratio of 3.
pub fn enhanced_scale_factor(width: usize, height: usize, d_over_h: f64) -> usize {
    let z = (min_dim(width, height) / REFERENCE_LINES) * (DEFAULT_D_OVER_H / d_over_h);
    if !z.is_finite() {
        return 1;
    }
    (z.round() as usize).max(1)
}

/// Full-screen viewing angle in degrees, `2 atan(H / 2D)`, and the
/// frequency of the pixel spacing `L / (2 alpha)` in cycles per degree.
pub fn viewing_geometry(display_h: f64, distance: f64, lines: f64) -> (f64, f64) {
    let alpha = 2.0 * (display_h / (2.0 * distance)).atan().to_degrees();
    (alpha, lines / (2.0 * alpha))
}

/// Self-adaptive scale factor with the default 40 by 50 degree field.
pub fn sast_factor(display_h: f64, display_w: f64, distance: f64) -> f64 {
    sast_factor_with_angles(display_h, display_w, distance, DEFAULT_THETA_H, DEFAULT_THETA_W)
}

/// `Z = sqrt(H_I W_I / (H W))` where `H = 2 D tan(theta_h / 2)` and
/// `W = 2 D tan(theta_w / 2)` span the assumed field of view; at least 1.
pub fn sast_factor_with_angles(
    display_h: f64,
    display_w: f64,
    distance: f64,
    theta_h: f64,
    theta_w: f64,
) -> f64 {
    let th = (theta_h.to_radians() / 2.0).tan();
    let tw = (theta_w.to_radians() / 2.0).tan();
    let z = ((1.0 / (4.0 * th * tw)) * (display_h / distance) * (display_w / distance)).sqrt();
    z.max(1.0)
}

/// `factor x factor` block averaging; trailing partial blocks are averaged
/// over the samples they contain.
pub fn box_downsample(plane: &Plane, factor: usize) -> Result<Plane> {
    if factor == 0 {
        return Err(Error::InvalidParameter("downsampling factor must be >= 1".into()));
    }
    if factor == 1 {
        return Ok(plane.clone());
    }
    let (w, h) = (plane.width(), plane.height());
    let (ow, oh) = (w.div_ceil(factor), h.div_ceil(factor));
    Plane::from_fn(ow, oh, |x, y| {
        let (x0, y0) = (x * factor, y * factor);
        let (x1, y1) = ((x0 + factor).min(w), (y0 + factor).min(h));
        let mut s = 0.0;
        for yy in y0..y1 {
            s += plane.row(yy)[x0..x1].iter().sum::<f64>();
        }
        s / ((x1 - x0) * (y1 - y0)) as f64
    })
}

/// Product of the scaling and compression SSIM features.
pub fn scaled_ssim_product(f_scale: f64, f_comp: f64) -> f64 {
    f_scale * f_comp
}

/// Relative cost of predicting scaled SSIM with a reference map refreshed
/// every `k` frames: `(1 - 1/k) alpha^2 (1 + beta + gamma) + (1/k)(1 + beta)`.
pub fn compute_ratio(k: usize, alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("refresh interval must be >= 1".into()));
    }
    let inv = 1.0 / k as f64;
    Ok((1.0 - inv) * alpha * alpha * (1.0 + beta + gamma) + inv * (1.0 + beta))
}

/// Predicts the SSIM of a scaled and compressed frame from its two
/// features, the scaling ratio `alpha` and the compression parameter `q`.
pub trait ScaledSsimPredictor {
    fn predict(&self, f_scale: f64, f_comp: f64, alpha: f64, q: f64) -> f64;
}

/// The feature product, ignoring `alpha` and `q`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ProductPredictor;

impl ScaledSsimPredictor for ProductPredictor {
    fn predict(&self, f_scale: f64, f_comp: f64, _alpha: f64, _q: f64) -> f64 {
        scaled_ssim_product(f_scale, f_comp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legacy_examples() {
        assert_eq!(legacy_scale_factor(1920, 1080), 4);
        assert_eq!(legacy_scale_factor(256, 256), 1);
        assert_eq!(legacy_scale_factor(100, 100), 1);
        assert_eq!(legacy_scale_factor(640, 384), 2);
        assert_eq!(legacy_scale_factor_ceil(1920, 1080), 5);
    }

    #[test]
    fn enhanced_examples() {
        assert_eq!(enhanced_scale_factor(1920, 1080, 3.0), 4);
        assert_eq!(enhanced_scale_factor(1920, 1080, 6.0), 2);
        assert_eq!(enhanced_scale_factor(1920, 1080, f64::INFINITY), 1);
        assert_eq!(enhanced_scale_factor(7680, 4320, 1e9), 1);
    }

    #[test]
    fn geometry() {
        let (a, f) = viewing_geometry(1.0, 3.0, 1080.0);
        assert!((a - 18.924644416051237).abs() < 1e-9);
        let (_, f2) = viewing_geometry(1.0, 3.0, 2160.0);
        assert!((f2 - 2.0 * f).abs() < 1e-12);
        let (a, _) = viewing_geometry(1.0, 1.0, 1.0);
        assert!((a - 53.13010235415598).abs() < 1e-9);
    }

    #[test]
    fn sast() {
        let d = 2.0;
        let h = d * 2.0 * 20f64.to_radians().tan();
        let w = d * 2.0 * 25f64.to_radians().tan();
        assert!((sast_factor(h, w, d) - 1.0).abs() < 1e-12);
        assert!((sast_factor(2.0 * h, 2.0 * w, d) - 2.0).abs() < 1e-12);
        let z = sast_factor(1.0, 1.0, 1.0);
        let expected = (1.0 / (4.0 * 20f64.to_radians().tan() * 25f64.to_radians().tan())).sqrt();
        assert!((z - expected).abs() < 1e-12);
        assert!((z - 1.214).abs() < 1e-3);
        assert_eq!(sast_factor(0.1, 0.1, 10.0), 1.0);
    }

    #[test]
    fn box_examples() {
        let p = Plane::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(box_downsample(&p, 1).unwrap(), p);
        assert_eq!(box_downsample(&p, 2).unwrap().data(), &[2.5]);
        let row = Plane::new(7, 1, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]).unwrap();
        assert_eq!(box_downsample(&row, 3).unwrap().data(), &[2.0, 5.0, 7.0]);
    }

    #[test]
    fn ratio_and_product() {
        assert!((compute_ratio(1, 0.5, 0.1, 0.1).unwrap() - 1.1).abs() < 1e-15);
        assert!((compute_ratio(5, 0.5, 0.1, 0.1).unwrap() - 0.46).abs() < 1e-15);
        let far = compute_ratio(1_000_000_000, 0.5, 0.1, 0.1).unwrap();
        assert!((far - 0.25 * 1.2).abs() < 1e-8);
        assert_eq!(scaled_ssim_product(0.9, 0.8), 0.9 * 0.8);
        assert_eq!(ProductPredictor.predict(1.0, 0.7, 0.5, 30.0), 0.7);
    }

    #[test]
    fn selector_round_trip() {
        for s in ["none", "legacy", "legacy-ceil", "dh:3", "sast:h=0.3,w=0.5,d=1,th=40,tw=50"] {
            let p: ScalePolicy = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("dh:0".parse::<ScalePolicy>().is_err());
        assert!("sast:h=1,w=1".parse::<ScalePolicy>().is_err());
    }
}
