//! Multi-scale SSIM over a dyadic pyramid.
//!
//! Scales `1..M-1` contribute the mean of their `cs` map, the coarsest scale
//! the mean of its full `l * cs` map. Per-scale means are exponentiated
//! after pooling.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::SsimConfig;
use crate::error::{Error, Result};
use crate::model::{check_dims, Plane};
use crate::selector::{self, Selector};
use crate::ssim::{mean_of, ssim_map};

/// Canonical five-scale exponents.
pub const STANDARD_EXPONENTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// Single scale; plain SSIM.
    Off,
    /// Exponent-weighted product.
    Product,
    /// Weighted average with exponents renormalized to sum to one.
    Sum,
    /// Four-scale product with the first four standard exponents renormalized.
    Fast4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiscaleSpec {
    pub aggregation: Aggregation,
    pub levels: usize,
    pub exponents: Vec<f64>,
}

impl MultiscaleSpec {
    pub fn off() -> Self {
        Self {
            aggregation: Aggregation::Off,
            levels: 1,
            exponents: vec![1.0],
        }
    }

    pub fn product() -> Self {
        Self {
            aggregation: Aggregation::Product,
            levels: 5,
            exponents: STANDARD_EXPONENTS.to_vec(),
        }
    }

    pub fn sum() -> Self {
        Self {
            aggregation: Aggregation::Sum,
            levels: 5,
            exponents: STANDARD_EXPONENTS.to_vec(),
        }
    }

    pub fn fast4() -> Self {
        Self {
            aggregation: Aggregation::Fast4,
            levels: 4,
            exponents: STANDARD_EXPONENTS[..4].to_vec(),
        }
    }

    /// Product aggregation with custom exponents (one level per exponent).
    pub fn with_exponents(aggregation: Aggregation, exponents: Vec<f64>) -> Self {
        Self {
            aggregation,
            levels: exponents.len(),
            exponents,
        }
    }

    /// Keeps the first `levels` exponents.
    pub fn truncated(&self, levels: usize) -> Result<Self> {
        if levels == 0 || levels > self.exponents.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate {} scales to {levels}",
                self.exponents.len()
            )));
        }
        Ok(Self {
            aggregation: self.aggregation,
            levels,
            exponents: self.exponents[..levels].to_vec(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 || self.exponents.len() != self.levels {
            return Err(Error::InvalidParameter(format!(
                "{} exponents for {} levels",
                self.exponents.len(),
                self.levels
            )));
        }
        if self.exponents.iter().any(|&b| !(b > 0.0) || !b.is_finite()) {
            return Err(Error::InvalidParameter("exponents must be positive".into()));
        }
        if self.aggregation == Aggregation::Fast4 && self.levels != 4 {
            return Err(Error::InvalidParameter("fast4 uses exactly 4 levels".into()));
        }
        if self.aggregation == Aggregation::Off && self.levels != 1 {
            return Err(Error::InvalidParameter("single-scale spec with several levels".into()));
        }
        Ok(())
    }

    /// Exponents as applied: renormalized to unit sum for sum and fast4.
    pub fn effective_exponents(&self) -> Vec<f64> {
        match self.aggregation {
            Aggregation::Sum | Aggregation::Fast4 => {
                let total: f64 = self.exponents.iter().sum();
                self.exponents.iter().map(|b| b / total).collect()
            }
            Aggregation::Off | Aggregation::Product => self.exponents.clone(),
        }
    }

    /// Combines per-scale scores (finest first).
    pub fn aggregate(&self, scores: &[f64]) -> f64 {
        let exps = self.effective_exponents();
        match self.aggregation {
            Aggregation::Sum => scores.iter().zip(&exps).map(|(s, b)| b * s).sum(),
            _ => scores
                .iter()
                .zip(&exps)
                .map(|(&s, &b)| signed_pow(s, b))
                .product(),
        }
    }
}

/// `sign(x) |x|^p`; keeps the product defined for negative pooled scores.
pub(crate) fn signed_pow(x: f64, p: f64) -> f64 {
    x.signum() * x.abs().powf(p)
}

impl fmt::Display for MultiscaleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.aggregation {
            Aggregation::Off => return write!(f, "off"),
            Aggregation::Product => "product",
            Aggregation::Sum => "sum",
            Aggregation::Fast4 => "fast4",
        };
        let default = match self.aggregation {
            Aggregation::Product => Self::product(),
            Aggregation::Sum => Self::sum(),
            _ => Self::fast4(),
        };
        if *self == default {
            write!(f, "{name}")
        } else if default.truncated(self.levels).ok().as_ref() == Some(self) {
            write!(f, "{name}:levels={}", self.levels)
        } else {
            let e: Vec<String> = self.exponents.iter().map(|b| b.to_string()).collect();
            write!(f, "{name}:{}", e.join(","))
        }
    }
}

impl FromStr for MultiscaleSpec {
    type Err = Error;

    /// `off`, `product`, `sum`, `fast4`, optionally `:levels=N` or an
    /// explicit exponent list such as `product:0.2,0.3,0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let sel = Selector::parse(s)?;
        sel.check_keys(&["levels"])?;
        let base = match sel.name.as_str() {
            "off" => {
                sel.expect_no_args()?;
                return Ok(Self::off());
            }
            "product" => Self::product(),
            "sum" => Self::sum(),
            "fast4" => Self::fast4(),
            other => return Err(selector::unknown(s, other)),
        };
        let spec = if !sel.positional.is_empty() {
            let exps = (0..sel.positional.len())
                .map(|i| sel.positional_f64(i))
                .collect::<Result<Vec<_>>>()?;
            Self::with_exponents(base.aggregation, exps)
        } else if let Some(levels) = sel.opt_usize("levels")? {
            base.truncated(levels)?
        } else {
            base
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// 2x2 average pooling; an odd trailing row or column is dropped.
pub fn dyadic_downsample(plane: &Plane) -> Result<Plane> {
    let (w, h) = (plane.width(), plane.height());
    if w < 2 || h < 2 {
        return Err(Error::TooSmall {
            width: w,
            height: h,
        });
    }
    Plane::from_fn(w / 2, h / 2, |x, y| {
        let (x0, y0) = (2 * x, 2 * y);
        (plane.get(x0, y0) + plane.get(x0 + 1, y0) + plane.get(x0, y0 + 1) + plane.get(x0 + 1, y0 + 1))
            / 4.0
    })
}

/// Smallest image dimension that supports `levels` scales for window size `k`.
pub fn min_dimension(k: usize, levels: usize) -> usize {
    k << (levels - 1)
}

/// Per-scale pooled scores, finest first: `mean(cs)` for all but the
/// coarsest scale, `mean(l * cs)` for the coarsest.
pub fn scale_scores(
    first: &Plane,
    second: &Plane,
    config: &SsimConfig,
    levels: usize,
) -> Result<Vec<f64>> {
    check_dims(first.width(), first.height(), second.width(), second.height())?;
    let needed = min_dimension(config.window.size(), levels);
    let have = first.width().min(first.height());
    if have < needed {
        return Err(Error::TooManyLevels {
            levels,
            needed,
            have,
        });
    }
    let mut scores = Vec::with_capacity(levels);
    let mut a = first.clone();
    let mut b = second.clone();
    for level in 0..levels {
        let maps = ssim_map(&a, &b, config)?;
        if level + 1 == levels {
            scores.push(mean_of(&maps.q_map)?);
        } else {
            scores.push(mean_of(&maps.cs_map)?);
            a = dyadic_downsample(&a)?;
            b = dyadic_downsample(&b)?;
        }
    }
    Ok(scores)
}

/// Multi-scale SSIM of a plane pair.
pub fn msssim(first: &Plane, second: &Plane, config: &SsimConfig, spec: &MultiscaleSpec) -> Result<f64> {
    spec.validate()?;
    let scores = scale_scores(first, second, config, spec.levels)?;
    Ok(spec.aggregate(&scores))
}
