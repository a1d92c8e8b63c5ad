use crate::error::{Error, Result};
use crate::model::QualityMap;
use crate::ssim::mean_of;

/// Bins over `[-1, 1]`; an odd count centers a bin on zero.
pub const HISTOGRAM_BINS: usize = 201;
/// Frames between reference refreshes.
pub const DEFAULT_REFRESH: usize = 5;

/// Predicts MSSIM at the rendering resolution from a cheaper map by
/// matching its distribution to a periodically refreshed reference map.
///
/// Each comp value is mapped to the reference quantile at its mid-rank
/// position `(rank - 0.5) / n`, ties sharing their averaged rank. Identical
/// multisets therefore map onto themselves.
#[derive(Clone, Debug)]
pub struct HistogramMatcher {
    refresh: usize,
    histogram: Vec<u64>,
    sorted_reference: Vec<f64>,
    reference_mean: f64,
    since_reference: usize,
}

impl Default for HistogramMatcher {
    fn default() -> Self {
        Self::new(DEFAULT_REFRESH).expect("default interval is valid")
    }
}

impl HistogramMatcher {
    pub fn new(refresh: usize) -> Result<Self> {
        if refresh == 0 {
            return Err(Error::InvalidParameter("refresh interval must be >= 1".into()));
        }
        Ok(Self {
            refresh,
            histogram: vec![0; HISTOGRAM_BINS],
            sorted_reference: Vec::new(),
            reference_mean: f64::NAN,
            since_reference: 0,
        })
    }

    pub fn refresh_interval(&self) -> usize {
        self.refresh
    }

    /// Whether the next call should carry a true map.
    pub fn needs_reference(&self) -> bool {
        self.sorted_reference.is_empty() || self.since_reference >= self.refresh
    }

    /// Reference histogram; values outside `[-1, 1]` land in the end bins.
    pub fn histogram(&self) -> &[u64] {
        &self.histogram
    }

    pub fn reference_mean(&self) -> Option<f64> {
        (!self.sorted_reference.is_empty()).then_some(self.reference_mean)
    }

    pub fn bin_of(v: f64) -> usize {
        let t = (v + 1.0) / 2.0 * HISTOGRAM_BINS as f64;
        (t.floor().max(0.0) as usize).min(HISTOGRAM_BINS - 1)
    }

    fn set_reference(&mut self, map: &QualityMap) -> Result<f64> {
        let mean = mean_of(map)?;
        let mut sorted = map.values().to_vec();
        sorted.sort_by(f64::total_cmp);
        self.histogram.iter_mut().for_each(|c| *c = 0);
        for &v in &sorted {
            self.histogram[Self::bin_of(v)] += 1;
        }
        self.sorted_reference = sorted;
        self.reference_mean = mean;
        self.since_reference = 1;
        Ok(mean)
    }

    /// Returns the true mean when `true_map` is given (and adopts it as the
    /// new reference), otherwise the mean of the matched `comp_map`.
    pub fn predict(&mut self, comp_map: &QualityMap, true_map: Option<&QualityMap>) -> Result<f64> {
        if let Some(t) = true_map {
            return self.set_reference(t);
        }
        if self.sorted_reference.is_empty() {
            return Err(Error::NoReferenceYet);
        }
        if comp_map.is_empty() {
            return Err(Error::EmptyMap);
        }
        self.since_reference += 1;
        let matched = self.transform(comp_map.values());
        Ok(matched.iter().sum::<f64>() / matched.len() as f64)
    }

    /// Maps each value to the reference quantile at its mid-rank.
    pub fn transform(&self, values: &[f64]) -> Vec<f64> {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut out = vec![0.0; n];
        let mut i = 0;
        while i < n {
            let mut j = i + 1;
            while j < n && values[order[j]] == values[order[i]] {
                j += 1;
            }
            // 1-based ranks i+1..=j averaged
            let rank = (i + 1 + j) as f64 / 2.0;
            let v = self.reference_quantile((rank - 0.5) / n as f64);
            for &idx in &order[i..j] {
                out[idx] = v;
            }
            i = j;
        }
        out
    }

    /// Linear interpolation between sorted reference samples at position
    /// `u m - 0.5` (0-based), clamped to the ends.
    fn reference_quantile(&self, u: f64) -> f64 {
        let s = &self.sorted_reference;
        let m = s.len();
        let pos = (u * m as f64 - 0.5).clamp(0.0, (m - 1) as f64);
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(m - 1);
        let frac = pos - lo as f64;
        if frac == 0.0 {
            s[lo]
        } else {
            s[lo] + frac * (s[hi] - s[lo])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(v: Vec<f64>) -> QualityMap {
        QualityMap::from_values(v)
    }

    #[test]
    fn needs_first_reference() {
        let mut m = HistogramMatcher::default();
        assert!(matches!(m.predict(&map(vec![0.5]), None), Err(Error::NoReferenceYet)));
        assert!(HistogramMatcher::new(0).is_err());
    }

    #[test]
    fn reference_call_is_passthrough() {
        let mut m = HistogramMatcher::default();
        let t = map(vec![0.2, 0.9, 0.7]);
        let v = m.predict(&map(vec![0.0; 3]), Some(&t)).unwrap();
        assert_eq!(v, mean_of(&t).unwrap());
        assert_eq!(m.histogram().iter().sum::<u64>(), 3);
    }

    #[test]
    fn refresh_schedule() {
        let mut m = HistogramMatcher::new(3).unwrap();
        let t = map(vec![0.5, 0.6]);
        assert!(m.needs_reference());
        m.predict(&t, Some(&t)).unwrap();
        assert!(!m.needs_reference());
        m.predict(&t, None).unwrap();
        m.predict(&t, None).unwrap();
        assert!(m.needs_reference());
    }

    #[test]
    fn bins() {
        assert_eq!(HistogramMatcher::bin_of(-1.0), 0);
        assert_eq!(HistogramMatcher::bin_of(1.0), HISTOGRAM_BINS - 1);
        assert_eq!(HistogramMatcher::bin_of(0.0), 100);
        assert_eq!(HistogramMatcher::bin_of(-7.0), 0);
    }
}
