use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    check_percentile, check_positive, cov, distortion_weighted, five_number_summary,
    mean_deviation, minkowski, percentile_pool,
};
use crate::error::{Error, Result};
use crate::model::QualityMap;
use crate::selector::{self, Selector};
use crate::ssim::mean_of;

/// Spatial pooling operator for a quality map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SpatialPooler {
    /// Arithmetic mean (MSSIM).
    Am,
    /// Standard deviation over mean.
    Cov,
    /// Mean deviation of order `p`, raised to `o`.
    Md { p: f64, o: f64 },
    /// Five-number summary.
    Fns,
    /// Distortion weighting with weights `(1 - Q)^p`.
    Dw { p: f64 },
    /// Minkowski mean of `(1 - Q)^p`.
    Mink { p: f64 },
    /// Luminance weighting ramp from `a` over an interval of `b`.
    Lw { a: f64, b: f64 },
    /// Lowest `ps` percent divided by `rs`.
    Pp { ps: f64, rs: f64 },
}

impl SpatialPooler {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SpatialPooler::Md { p, o } => {
                check_positive("md p", p)?;
                if !o.is_finite() {
                    return Err(Error::InvalidParameter("md o must be finite".into()));
                }
                Ok(())
            }
            SpatialPooler::Dw { p } => check_positive("dw p", p),
            SpatialPooler::Mink { p } => check_positive("mink p", p),
            SpatialPooler::Lw { a, b } => {
                if !(b >= 0.0) || !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidParameter(format!("lw needs b >= 0, got {b}")));
                }
                Ok(())
            }
            SpatialPooler::Pp { ps, rs } => check_percentile("pp", ps, rs),
            _ => Ok(()),
        }
    }

    pub fn needs_reference_mean(&self) -> bool {
        matches!(self, SpatialPooler::Lw { .. })
    }
}

fn lw_weight(mu: f64, a: f64, b: f64) -> f64 {
    if mu < a {
        0.0
    } else if mu < a + b {
        (mu - a) / b
    } else {
        1.0
    }
}

/// Pools `map` to a scalar. `ref_mean` is the reference image's local-mean
/// map on the same grid and is only consulted by luminance weighting.
pub fn pool_spatial(
    map: &QualityMap,
    method: SpatialPooler,
    ref_mean: Option<&QualityMap>,
) -> Result<f64> {
    if map.is_empty() {
        return Err(Error::EmptyMap);
    }
    method.validate()?;
    let v = map.values();
    Ok(match method {
        SpatialPooler::Am => mean_of(map)?,
        SpatialPooler::Cov => cov(v)?,
        SpatialPooler::Md { p, o } => mean_deviation(v, p, o),
        SpatialPooler::Fns => five_number_summary(v),
        SpatialPooler::Dw { p } => distortion_weighted(v, p),
        SpatialPooler::Mink { p } => minkowski(v, p),
        SpatialPooler::Pp { ps, rs } => percentile_pool(v, ps, rs),
        SpatialPooler::Lw { a, b } => {
            let mu = ref_mean.ok_or(Error::MissingLumaForLW)?;
            if mu.len() != map.len() {
                return Err(Error::InvalidParameter(format!(
                    "reference mean map has {} entries, quality map {}",
                    mu.len(),
                    map.len()
                )));
            }
            let weighted: Vec<f64> = v
                .iter()
                .zip(mu.values())
                .map(|(&q, &m)| lw_weight(m, a, b) * q)
                .collect();
            super::mean(&weighted)
        }
    })
}

impl fmt::Display for SpatialPooler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpatialPooler::Am => write!(f, "am"),
            SpatialPooler::Cov => write!(f, "cov"),
            SpatialPooler::Md { p, o } => write!(f, "md:p={p},o={o}"),
            SpatialPooler::Fns => write!(f, "fns"),
            SpatialPooler::Dw { p } => write!(f, "dw:p={p}"),
            SpatialPooler::Mink { p } => write!(f, "mink:p={p}"),
            SpatialPooler::Lw { a, b } => write!(f, "lw:a={a},b={b}"),
            SpatialPooler::Pp { ps, rs } => write!(f, "pp:ps={ps},rs={rs}"),
        }
    }
}

impl FromStr for SpatialPooler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sel = Selector::parse(s)?;
        let pooler = match sel.name.as_str() {
            "am" | "mean" => {
                sel.expect_no_args()?;
                SpatialPooler::Am
            }
            "cov" => {
                sel.expect_no_args()?;
                SpatialPooler::Cov
            }
            "fns" => {
                sel.expect_no_args()?;
                SpatialPooler::Fns
            }
            "md" => {
                sel.check_keys(&["p", "o"])?;
                SpatialPooler::Md {
                    p: sel.req_f64("p")?,
                    o: sel.opt_f64("o")?.unwrap_or(1.0),
                }
            }
            "dw" => {
                sel.check_keys(&["p"])?;
                SpatialPooler::Dw { p: sel.req_f64("p")? }
            }
            "mink" => {
                sel.check_keys(&["p"])?;
                SpatialPooler::Mink { p: sel.req_f64("p")? }
            }
            "lw" => {
                sel.check_keys(&["a", "b"])?;
                SpatialPooler::Lw {
                    a: sel.req_f64("a")?,
                    b: sel.req_f64("b")?,
                }
            }
            "pp" => {
                sel.check_keys(&["ps", "rs"])?;
                SpatialPooler::Pp {
                    ps: sel.req_f64("ps")?,
                    rs: sel.req_f64("rs")?,
                }
            }
            other => return Err(selector::unknown(s, other)),
        };
        pooler.validate()?;
        Ok(pooler)
    }
}

impl TryFrom<String> for SpatialPooler {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SpatialPooler> for String {
    fn from(p: SpatialPooler) -> String {
        p.to_string()
    }
}
