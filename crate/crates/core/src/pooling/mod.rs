//! Spatial pooling of quality maps and temporal pooling of score series.
//!
//! Selectors use the compact grammar from [`crate::selector`], e.g. `cov`,
//! `md:p=2,o=3`, `pp:ps=6,rs=4000`, `wam:k=3`.

mod spatial;
mod temporal;

pub use spatial::{pool_spatial, SpatialPooler};
pub use temporal::{pool_temporal, TemporalPooler, POSITIVE_FLOOR};

use crate::error::{Error, Result};

/// Mean taken about the minimum, so a constant input returns itself exactly.
pub(crate) fn mean(v: &[f64]) -> f64 {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    lo + v.iter().map(|x| x - lo).sum::<f64>() / v.len() as f64
}

/// Population standard deviation, two-pass.
pub(crate) fn pop_std(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
}

pub(crate) fn cov(v: &[f64]) -> Result<f64> {
    let m = mean(v);
    if m == 0.0 {
        return Err(Error::ZeroMeanCoV);
    }
    Ok(pop_std(v) / m)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Quantile of sorted data at fraction `q` with linear interpolation
/// between order statistics (position `q * (n - 1)`).
pub(crate) fn quantile_sorted(s: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        s[lo]
    } else {
        s[lo] + (s[hi] - s[lo]) * frac
    }
}

pub(crate) fn median(v: &[f64]) -> f64 {
    quantile_sorted(&sorted(v), 0.5)
}

/// Mean of min, lower quartile, median, upper quartile and max.
pub(crate) fn five_number_summary(v: &[f64]) -> f64 {
    let s = sorted(v);
    let q = |f| quantile_sorted(&s, f);
    (s[0] + q(0.25) + q(0.5) + q(0.75) + s[s.len() - 1]) / 5.0
}

/// `((mean |x - mu|^p)^(1/p))^o`.
pub(crate) fn mean_deviation(v: &[f64], p: f64, o: f64) -> f64 {
    let m = mean(v);
    let d = v.iter().map(|x| (x - m).abs().powf(p)).sum::<f64>() / v.len() as f64;
    d.powf(1.0 / p).powf(o)
}

/// `sum (1 - x)^p x / sum (1 - x)^p`; uniform weights when every weight
/// vanishes (all scores at 1).
pub(crate) fn distortion_weighted(v: &[f64], p: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for &x in v {
        let w = (1.0 - x).max(0.0).powf(p);
        num += w * x;
        den += w;
    }
    if den == 0.0 {
        mean(v)
    } else {
        num / den
    }
}

/// Mean of `(1 - x)^p` with the sign of `1 - x` preserved.
pub(crate) fn minkowski(v: &[f64], p: f64) -> f64 {
    v.iter()
        .map(|&x| {
            let d = 1.0 - x;
            d.signum() * d.abs().powf(p)
        })
        .sum::<f64>()
        / v.len() as f64
}

/// Divides values strictly below the `pct`-th percentile by `r`, then
/// averages. `pct = 100` re-weights everything.
pub(crate) fn percentile_pool(v: &[f64], pct: f64, r: f64) -> f64 {
    let s = sorted(v);
    let threshold = quantile_sorted(&s, pct / 100.0);
    let all = pct >= 100.0;
    let scaled: Vec<f64> = v.iter().map(|&x| if all || x < threshold { x / r } else { x }).collect();
    mean(&scaled)
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

pub(crate) fn check_percentile(name: &str, pct: f64, r: f64) -> Result<()> {
    if !(0.0..=100.0).contains(&pct) {
        return Err(Error::InvalidParameter(format!("{name} percentile {pct} outside [0, 100]")));
    }
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} factor {r} must be >= 1")));
    }
    Ok(())
}
