//! Color conversions and color SSIM models: channel-wise YCbCr, fixed
//! channel weights, quaternion SSIM, CIELAB-weighted SSIM and hue SSIM.

mod convert;
mod quaternion;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use convert::{
    chroma_offset, hue_degrees, luma_of, rgb_to_hsv, rgb_to_lab, rgb_to_smoothed_lab,
    rgb_to_xyz, rgb_to_ycbcr_bt709, upsample_chroma, white_point, xyz_to_lab,
    ycbcr_to_rgb_bt709, BT709_CB, BT709_CR, BT709_LUMA, CHROMA_SMOOTHING_SIGMA,
    CHROMA_SMOOTHING_SIZE, Q_TO_XYZ, XYZ_TO_Q,
};
pub use quaternion::{qssim, qssim_map};

use crate::config::SsimConfig;
use crate::error::{Error, Result};
use crate::model::{check_dims, ColorFrame, ColorSpace, Plane, QualityMap};
use crate::selector::{self, Selector};
use crate::ssim::{mean_of, mssim, ssim_map};
use crate::stats::local_mean;

/// The color space a quaternion is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuaternionSpace {
    Rgb,
    Yuv,
    Lab,
}

/// Which color model scores a frame pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ColorModelSpec {
    LumaOnly,
    /// `(f(Y) + alpha f(Cb) + beta f(Cr)) / (1 + alpha + beta)`.
    ChannelWise { alpha: f64, beta: f64 },
    /// `wy f(Y) + wcb f(Cb) + wcr f(Cr)` with weights summing to one.
    FixedWeights { wy: f64, wcb: f64, wcr: f64 },
    Qssim { space: QuaternionSpace },
    Cmssim,
    Hssim,
}

/// Channel weights that work best on the tested databases.
pub const OPTIMIZED_CHANNEL_WEIGHT: f64 = -0.3;
/// Conventional fixed weights for Y, Cb, Cr.
pub const FIXED_WEIGHTS: [f64; 3] = [0.8, 0.1, 0.1];
/// Hue similarity weight in HSSIM.
pub const HUE_WEIGHT: f64 = 0.2;
/// CIELAB distance at which the CMSSIM weight reaches zero.
pub const DELTA_E_LIMIT: f64 = 45.0;

impl ColorModelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ColorModelSpec::ChannelWise { alpha, beta } => {
                if 1.0 + alpha + beta == 0.0 {
                    return Err(Error::DegenerateWeights);
                }
                Ok(())
            }
            ColorModelSpec::FixedWeights { wy, wcb, wcr } => {
                if ((wy + wcb + wcr) - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidParameter(format!(
                        "fixed weights must sum to 1, got {}",
                        wy + wcb + wcr
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_luma_only(&self) -> bool {
        matches!(self, ColorModelSpec::LumaOnly)
    }
}

impl fmt::Display for ColorModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColorModelSpec::LumaOnly => write!(f, "luma"),
            ColorModelSpec::ChannelWise { alpha, beta } => write!(f, "cw:a={alpha},b={beta}"),
            ColorModelSpec::FixedWeights { wy, wcb, wcr } => write!(f, "fixed:{wy},{wcb},{wcr}"),
            ColorModelSpec::Qssim { space } => match space {
                QuaternionSpace::Rgb => write!(f, "qssim"),
                QuaternionSpace::Yuv => write!(f, "qssim:yuv"),
                QuaternionSpace::Lab => write!(f, "qssim:lab"),
            },
            ColorModelSpec::Cmssim => write!(f, "cmssim"),
            ColorModelSpec::Hssim => write!(f, "hssim"),
        }
    }
}

impl FromStr for ColorModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sel = Selector::parse(s)?;
        let spec = match sel.name.as_str() {
            "luma" => {
                sel.expect_no_args()?;
                ColorModelSpec::LumaOnly
            }
            "cw" => {
                sel.check_keys(&["a", "b"])?;
                ColorModelSpec::ChannelWise {
                    alpha: sel.opt_f64("a")?.unwrap_or(OPTIMIZED_CHANNEL_WEIGHT),
                    beta: sel.opt_f64("b")?.unwrap_or(OPTIMIZED_CHANNEL_WEIGHT),
                }
            }
            "fixed" => {
                sel.check_keys(&[])?;
                if sel.positional.is_empty() {
                    let [wy, wcb, wcr] = FIXED_WEIGHTS;
                    ColorModelSpec::FixedWeights { wy, wcb, wcr }
                } else {
                    ColorModelSpec::FixedWeights {
                        wy: sel.positional_f64(0)?,
                        wcb: sel.positional_f64(1)?,
                        wcr: sel.positional_f64(2)?,
                    }
                }
            }
            "qssim" => {
                sel.check_keys(&[])?;
                let space = match sel.positional.first().map(|s| s.to_lowercase()).as_deref() {
                    None | Some("rgb") => QuaternionSpace::Rgb,
                    Some("yuv") => QuaternionSpace::Yuv,
                    Some("lab") => QuaternionSpace::Lab,
                    Some(_) => return Err(selector::bad(s, "space must be rgb, yuv or lab")),
                };
                ColorModelSpec::Qssim { space }
            }
            "cmssim" => {
                sel.expect_no_args()?;
                ColorModelSpec::Cmssim
            }
            "hssim" => {
                sel.expect_no_args()?;
                ColorModelSpec::Hssim
            }
            other => return Err(selector::unknown(s, other)),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl TryFrom<String> for ColorModelSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ColorModelSpec> for String {
    fn from(c: ColorModelSpec) -> String {
        c.to_string()
    }
}

fn check_pair(a: &ColorFrame, b: &ColorFrame) -> Result<()> {
    check_dims(a.width(), a.height(), b.width(), b.height())?;
    if a.space() != b.space() {
        return Err(Error::WrongSpace {
            expected: a.space().name(),
            got: b.space().name(),
        });
    }
    if a.chroma() != b.chroma() {
        return Err(Error::InvalidParameter("chroma subsampling differs".into()));
    }
    Ok(())
}

/// Mean SSIM of each YCbCr channel; chroma is scored at its own resolution.
pub fn channel_scores(reference: &ColorFrame, distorted: &ColorFrame, config: &SsimConfig) -> Result<[f64; 3]> {
    reference.expect_space(ColorSpace::YCbCrBt709)?;
    check_pair(reference, distorted)?;
    let score = |i: usize| mssim(&ssim_map(reference.plane(i), distorted.plane(i), config)?);
    Ok([score(0)?, score(1)?, score(2)?])
}

/// `(sY + alpha sCb + beta sCr) / (1 + alpha + beta)`.
pub fn combine_channelwise(scores: [f64; 3], alpha: f64, beta: f64) -> Result<f64> {
    let den = 1.0 + alpha + beta;
    if den == 0.0 {
        return Err(Error::DegenerateWeights);
    }
    Ok((scores[0] + alpha * scores[1] + beta * scores[2]) / den)
}

/// Channel-wise color SSIM of two YCbCr frames.
pub fn channelwise_cssim(
    reference: &ColorFrame,
    distorted: &ColorFrame,
    alpha: f64,
    beta: f64,
    config: &SsimConfig,
) -> Result<f64> {
    if 1.0 + alpha + beta == 0.0 {
        return Err(Error::DegenerateWeights);
    }
    combine_channelwise(channel_scores(reference, distorted, config)?, alpha, beta)
}

/// Fixed-weight channel combination of two YCbCr frames.
pub fn fixed_weights_cssim(
    reference: &ColorFrame,
    distorted: &ColorFrame,
    weights: [f64; 3],
    config: &SsimConfig,
) -> Result<f64> {
    let s = channel_scores(reference, distorted, config)?;
    Ok(weights[0] * s[0] + weights[1] * s[1] + weights[2] * s[2])
}

/// CIELAB-weighted SSIM map: the luma quality map multiplied by
/// `clamp(1 - dE / 45, 0, 1)`, where `dE` is the window mean of the
/// per-pixel CIELAB distance on the same grid.
pub fn cmssim_map(reference: &ColorFrame, distorted: &ColorFrame, config: &SsimConfig) -> Result<QualityMap> {
    reference.expect_space(ColorSpace::Rgb)?;
    check_pair(reference, distorted)?;
    let luma = ssim_map(&luma_of(reference)?, &luma_of(distorted)?, config)?;
    let lab1 = rgb_to_smoothed_lab(reference)?;
    let lab2 = rgb_to_smoothed_lab(distorted)?;
    let (w, h) = (reference.width(), reference.height());
    let delta_e = Plane::from_fn(w, h, |x, y| {
        (0..3)
            .map(|c| (lab1.plane(c).get(x, y) - lab2.plane(c).get(x, y)).powi(2))
            .sum::<f64>()
            .sqrt()
    })?;
    let de = local_mean(&delta_e, &config.window, config.engine)?;
    let values = luma
        .q_map
        .values()
        .iter()
        .zip(de.values())
        .map(|(&q, &d)| q * (1.0 - d / DELTA_E_LIMIT).clamp(0.0, 1.0))
        .collect();
    luma.q_map.with_values(values)
}

pub fn cmssim(reference: &ColorFrame, distorted: &ColorFrame, config: &SsimConfig) -> Result<f64> {
    mean_of(&cmssim_map(reference, distorted, config)?)
}

fn as_rgb(frame: &ColorFrame) -> Result<ColorFrame> {
    match frame.space() {
        ColorSpace::Rgb => Ok(frame.clone()),
        ColorSpace::YCbCrBt709 => ycbcr_to_rgb_bt709(frame),
        other => Err(Error::WrongSpace {
            expected: "RGB or YCbCr-BT709",
            got: other.name(),
        }),
    }
}

/// `(SSIM + 0.2 H) / 1.2` with `H` the SSIM of the hue channels.
pub fn hssim(reference: &ColorFrame, distorted: &ColorFrame, config: &SsimConfig) -> Result<f64> {
    check_dims(reference.width(), reference.height(), distorted.width(), distorted.height())?;
    let r = as_rgb(reference)?;
    let d = as_rgb(distorted)?;
    let luma = mssim(&ssim_map(&luma_of(&r)?, &luma_of(&d)?, config)?)?;
    let hue = mssim(&ssim_map(rgb_to_hsv(&r)?.plane(0), rgb_to_hsv(&d)?.plane(0), config)?)?;
    Ok((luma + HUE_WEIGHT * hue) / (1.0 + HUE_WEIGHT))
}

/// Scores a frame pair under `config.color`.
pub fn score_color(reference: &ColorFrame, distorted: &ColorFrame, config: &SsimConfig) -> Result<f64> {
    let ycbcr = |f: &ColorFrame| match f.space() {
        ColorSpace::Rgb => rgb_to_ycbcr_bt709(f),
        _ => Ok(f.clone()),
    };
    match config.color {
        ColorModelSpec::LumaOnly => {
            check_dims(reference.width(), reference.height(), distorted.width(), distorted.height())?;
            mssim(&ssim_map(&luma_of(reference)?, &luma_of(distorted)?, config)?)
        }
        ColorModelSpec::ChannelWise { alpha, beta } => {
            channelwise_cssim(&ycbcr(reference)?, &ycbcr(distorted)?, alpha, beta, config)
        }
        ColorModelSpec::FixedWeights { wy, wcb, wcr } => {
            fixed_weights_cssim(&ycbcr(reference)?, &ycbcr(distorted)?, [wy, wcb, wcr], config)
        }
        ColorModelSpec::Qssim { space } => {
            let convert = |f: &ColorFrame| -> Result<ColorFrame> {
                let rgb = as_rgb(f)?;
                match space {
                    QuaternionSpace::Rgb => Ok(rgb),
                    QuaternionSpace::Yuv => rgb_to_ycbcr_bt709(&rgb),
                    QuaternionSpace::Lab => rgb_to_lab(&rgb),
                }
            };
            qssim(&convert(reference)?, &convert(distorted)?, config)
        }
        ColorModelSpec::Cmssim => cmssim(&as_rgb(reference)?, &as_rgb(distorted)?, config),
        ColorModelSpec::Hssim => hssim(reference, distorted, config),
    }
}
