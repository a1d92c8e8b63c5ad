use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    check_percentile, check_positive, cov, distortion_weighted, five_number_summary, mean,
    mean_deviation, median, minkowski, percentile_pool,
};
use crate::error::{Error, Result};
use crate::model::ScoreSeries;
use crate::selector::{self, Selector};

/// Inputs to geometric and harmonic means are clamped up to this value.
pub const POSITIVE_FLOOR: f64 = 1e-6;

/// Temporal pooling operator for a series of frame scores.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TemporalPooler {
    Am,
    Gm,
    Hm,
    Median,
    Cov,
    /// Sliding-window CoV averaged over windows of length `k`.
    WCov { k: usize },
    WAm { k: usize },
    WGm { k: usize },
    WHm { k: usize },
    Md { p: f64, o: f64 },
    Fns,
    Dw { p: f64 },
    Mink { p: f64 },
    Pp { pt: f64, rt: f64 },
}

impl TemporalPooler {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TemporalPooler::WCov { k }
            | TemporalPooler::WAm { k }
            | TemporalPooler::WGm { k }
            | TemporalPooler::WHm { k } => {
                if k == 0 {
                    return Err(Error::InvalidParameter("temporal window must be >= 1".into()));
                }
                Ok(())
            }
            TemporalPooler::Md { p, o } => {
                check_positive("md p", p)?;
                if !o.is_finite() {
                    return Err(Error::InvalidParameter("md o must be finite".into()));
                }
                Ok(())
            }
            TemporalPooler::Dw { p } => check_positive("dw p", p),
            TemporalPooler::Mink { p } => check_positive("mink p", p),
            TemporalPooler::Pp { pt, rt } => check_percentile("pp", pt, rt),
            _ => Ok(()),
        }
    }
}

fn floored_min(v: &[f64]) -> f64 {
    v.iter().fold(f64::INFINITY, |m, &x| m.min(x.max(POSITIVE_FLOOR)))
}

// Both means are taken relative to the smallest value so a constant series
// comes back unchanged.
fn geometric(v: &[f64]) -> f64 {
    let lo = floored_min(v);
    let logs: Vec<f64> = v.iter().map(|x| (x.max(POSITIVE_FLOOR) / lo).ln()).collect();
    lo * mean(&logs).exp()
}

fn harmonic(v: &[f64]) -> f64 {
    let lo = floored_min(v);
    let ratios: Vec<f64> = v.iter().map(|x| lo / x.max(POSITIVE_FLOOR)).collect();
    lo / mean(&ratios)
}

/// Averages `stat` over every length-`k` sliding window (stride 1). A series
/// shorter than `k` is a single window.
fn windowed(v: &[f64], k: usize, stat: impl Fn(&[f64]) -> Result<f64>) -> Result<f64> {
    let k = k.min(v.len());
    let stats = v.windows(k).map(stat).collect::<Result<Vec<_>>>()?;
    Ok(mean(&stats))
}

pub fn pool_temporal(series: &ScoreSeries, method: TemporalPooler) -> Result<f64> {
    let v = series.scores();
    if v.is_empty() {
        return Err(Error::EmptySeries);
    }
    method.validate()?;
    Ok(match method {
        TemporalPooler::Am => mean(v),
        TemporalPooler::Gm => geometric(v),
        TemporalPooler::Hm => harmonic(v),
        TemporalPooler::Median => median(v),
        TemporalPooler::Cov => cov(v)?,
        TemporalPooler::WCov { k } => windowed(v, k, cov)?,
        TemporalPooler::WAm { k } => windowed(v, k, |w| Ok(mean(w)))?,
        TemporalPooler::WGm { k } => windowed(v, k, |w| Ok(geometric(w)))?,
        TemporalPooler::WHm { k } => windowed(v, k, |w| Ok(harmonic(w)))?,
        TemporalPooler::Md { p, o } => mean_deviation(v, p, o),
        TemporalPooler::Fns => five_number_summary(v),
        TemporalPooler::Dw { p } => distortion_weighted(v, p),
        TemporalPooler::Mink { p } => minkowski(v, p),
        TemporalPooler::Pp { pt, rt } => percentile_pool(v, pt, rt),
    })
}

impl fmt::Display for TemporalPooler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemporalPooler::Am => write!(f, "am"),
            TemporalPooler::Gm => write!(f, "gm"),
            TemporalPooler::Hm => write!(f, "hm"),
            TemporalPooler::Median => write!(f, "median"),
            TemporalPooler::Cov => write!(f, "cov"),
            TemporalPooler::WCov { k } => write!(f, "wcov:k={k}"),
            TemporalPooler::WAm { k } => write!(f, "wam:k={k}"),
            TemporalPooler::WGm { k } => write!(f, "wgm:k={k}"),
            TemporalPooler::WHm { k } => write!(f, "whm:k={k}"),
            TemporalPooler::Md { p, o } => write!(f, "md:p={p},o={o}"),
            TemporalPooler::Fns => write!(f, "fns"),
            TemporalPooler::Dw { p } => write!(f, "dw:p={p}"),
            TemporalPooler::Mink { p } => write!(f, "mink:p={p}"),
            TemporalPooler::Pp { pt, rt } => write!(f, "pp:pt={pt},rt={rt}"),
        }
    }
}

impl FromStr for TemporalPooler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sel = Selector::parse(s)?;
        let simple = |p: TemporalPooler| -> Result<TemporalPooler> {
            sel.expect_no_args()?;
            Ok(p)
        };
        let window = || -> Result<usize> {
            sel.check_keys(&["k"])?;
            sel.req_usize("k")
        };
        let pooler = match sel.name.as_str() {
            "am" | "mean" => simple(TemporalPooler::Am)?,
            "gm" => simple(TemporalPooler::Gm)?,
            "hm" => simple(TemporalPooler::Hm)?,
            "median" => simple(TemporalPooler::Median)?,
            "cov" => simple(TemporalPooler::Cov)?,
            "fns" => simple(TemporalPooler::Fns)?,
            "wcov" => TemporalPooler::WCov { k: window()? },
            "wam" => TemporalPooler::WAm { k: window()? },
            "wgm" => TemporalPooler::WGm { k: window()? },
            "whm" => TemporalPooler::WHm { k: window()? },
            "md" => {
                sel.check_keys(&["p", "o"])?;
                TemporalPooler::Md {
                    p: sel.req_f64("p")?,
                    o: sel.opt_f64("o")?.unwrap_or(1.0),
                }
            }
            "dw" => {
                sel.check_keys(&["p"])?;
                TemporalPooler::Dw { p: sel.req_f64("p")? }
            }
            "mink" => {
                sel.check_keys(&["p"])?;
                TemporalPooler::Mink { p: sel.req_f64("p")? }
            }
            "pp" => {
                sel.check_keys(&["pt", "rt"])?;
                TemporalPooler::Pp {
                    pt: sel.req_f64("pt")?,
                    rt: sel.req_f64("rt")?,
                }
            }
            other => return Err(selector::unknown(s, other)),
        };
        pooler.validate()?;
        Ok(pooler)
    }
}

impl TryFrom<String> for TemporalPooler {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TemporalPooler> for String {
    fn from(p: TemporalPooler) -> String {
        p.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: &[f64]) -> ScoreSeries {
        ScoreSeries::new(v.to_vec())
    }

    #[test]
    fn constant_series() {
        let s = series(&[0.9; 7]);
        for p in [TemporalPooler::Am, TemporalPooler::Gm, TemporalPooler::Hm, TemporalPooler::Median] {
            assert!((pool_temporal(&s, p).unwrap() - 0.9).abs() < 1e-15, "{p}");
        }
        assert_eq!(pool_temporal(&s, TemporalPooler::Cov).unwrap(), 0.0);
    }

    #[test]
    fn pythagorean_example() {
        let s = series(&[0.25, 1.0]);
        assert!((pool_temporal(&s, TemporalPooler::Gm).unwrap() - 0.5).abs() < 1e-15);
        assert!((pool_temporal(&s, TemporalPooler::Hm).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(pool_temporal(&s, TemporalPooler::Am).unwrap(), 0.625);
    }

    #[test]
    fn sliding_means_match_brute_force() {
        let v: Vec<f64> = (0..10).map(|i| 0.5 + 0.04 * ((i * 7) % 10) as f64).collect();
        let got = pool_temporal(&series(&v), TemporalPooler::WAm { k: 3 }).unwrap();
        let mut means = Vec::new();
        for start in 0..8 {
            means.push((v[start] + v[start + 1] + v[start + 2]) / 3.0);
        }
        let expected = means.iter().sum::<f64>() / 8.0;
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn short_series_is_one_window() {
        let s = series(&[0.2, 0.4, 0.9]);
        assert_eq!(
            pool_temporal(&s, TemporalPooler::WGm { k: 10 }).unwrap(),
            pool_temporal(&s, TemporalPooler::Gm).unwrap()
        );
    }

    #[test]
    fn floor_clamps_non_positive() {
        let s = series(&[0.0, 1.0]);
        let gm = pool_temporal(&s, TemporalPooler::Gm).unwrap();
        assert!((gm - POSITIVE_FLOOR.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn empty_series() {
        assert!(matches!(
            pool_temporal(&series(&[]), TemporalPooler::Am),
            Err(Error::EmptySeries)
        ));
    }

    #[test]
    fn selector_round_trip() {
        for s in [
            "am", "gm", "hm", "median", "cov", "wcov:k=5", "wam:k=3", "wgm:k=80", "whm:k=2",
            "md:p=2,o=1", "fns", "dw:p=8", "mink:p=0.125", "pp:pt=6,rt=4000",
        ] {
            let p: TemporalPooler = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("wam:k=0".parse::<TemporalPooler>().is_err());
        assert!("wam".parse::<TemporalPooler>().is_err());
    }
}
