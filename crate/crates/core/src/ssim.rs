//! SSIM term maps and the mean SSIM score.

use crate::config::SsimConfig;
use crate::error::{Error, Result};
use crate::model::{Plane, QualityMap};
use crate::stats::{local_statistics, LocalStatsMaps};

/// Luminance, combined contrast-structure, and quality maps. `q = l * cs`.
#[derive(Clone, Debug, PartialEq)]
pub struct SsimTermMaps {
    pub l_map: QualityMap,
    pub cs_map: QualityMap,
    pub q_map: QualityMap,
}

/// Per-window luminance and contrast-structure terms:
///
/// ```text
/// l  = (2 mu1 mu2 + C1) / (mu1^2 + mu2^2 + C1)
/// cs = (2 cov + C2)     / (var1 + var2 + C2)
/// ```
///
/// Products are formed as `2 * (a * b)` so swapping the inputs is exact.
pub fn terms_from_stats(stats: &LocalStatsMaps, c1: f64, c2: f64) -> Result<SsimTermMaps> {
    let n = stats.mu1.len();
    let mut l = Vec::with_capacity(n);
    let mut cs = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for i in 0..n {
        let (m1, m2) = (stats.mu1.values()[i], stats.mu2.values()[i]);
        let (v1, v2) = (stats.var1.values()[i], stats.var2.values()[i]);
        let c = stats.cov.values()[i];
        let li = (2.0 * (m1 * m2) + c1) / ((m1 * m1 + m2 * m2) + c1);
        let csi = (2.0 * c + c2) / ((v1 + v2) + c2);
        l.push(li);
        cs.push(csi);
        q.push(li * csi);
    }
    Ok(SsimTermMaps {
        l_map: stats.mu1.with_values(l)?,
        cs_map: stats.mu1.with_values(cs)?,
        q_map: stats.mu1.with_values(q)?,
    })
}

/// SSIM maps of a pair of single-channel planes under `config`'s window,
/// engine and constants.
pub fn ssim_map(first: &Plane, second: &Plane, config: &SsimConfig) -> Result<SsimTermMaps> {
    let stats = local_statistics(first, second, &config.window, config.engine)?;
    terms_from_stats(&stats, config.c1(), config.c2())
}

/// Arithmetic mean of the quality map.
pub fn mssim(maps: &SsimTermMaps) -> Result<f64> {
    mean_of(&maps.q_map)
}

pub(crate) fn mean_of(map: &QualityMap) -> Result<f64> {
    if map.is_empty() {
        return Err(Error::EmptyMap);
    }
    Ok(crate::pooling::mean(map.values()))
}

/// Luminance term for a relative luminance shift `lambda`, with
/// `c = C1 / mu1^2`:
/// `(2 (1 + lambda) + c) / (1 + (1 + lambda)^2 + c)`.
pub fn weber_luminance_term(lambda: f64, c1_over_mu1_sq: f64) -> f64 {
    let r = 1.0 + lambda;
    (2.0 * r + c1_over_mu1_sq) / (1.0 + r * r + c1_over_mu1_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{Engine, WindowSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plane(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Plane {
        Plane::from_fn(w, h, |_, _| rng.gen_range(0..256) as f64).unwrap()
    }

    #[test]
    fn identical_inputs_give_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_plane(&mut rng, 30, 25);
        let maps = ssim_map(&a, &a, &SsimConfig::default()).unwrap();
        assert!(maps.q_map.values().iter().all(|&q| (q - 1.0).abs() < 1e-12));
        assert!((mssim(&maps).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_pair_closed_form() {
        let a = Plane::filled(16, 16, 100.0).unwrap();
        let b = Plane::filled(16, 16, 110.0).unwrap();
        let maps = ssim_map(&a, &b, &SsimConfig::default()).unwrap();
        let c1 = 6.5025;
        let expected = (2.0 * 100.0 * 110.0 + c1) / (100.0f64.powi(2) + 110.0f64.powi(2) + c1);
        assert!((expected - 0.995476).abs() < 1e-6);
        for ((&l, &cs), &q) in maps
            .l_map
            .values()
            .iter()
            .zip(maps.cs_map.values())
            .zip(maps.q_map.values())
        {
            assert!((l - expected).abs() < 1e-12);
            assert_eq!(cs, 1.0);
            assert_eq!(q, l);
        }
    }

    #[test]
    fn symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = random_plane(&mut rng, 20, 20);
        let b = random_plane(&mut rng, 20, 20);
        for w in [WindowSpec::default(), WindowSpec::gaussian(1.5, None).unwrap()] {
            let cfg = SsimConfig::default().with_window(w);
            assert_eq!(ssim_map(&a, &b, &cfg).unwrap(), ssim_map(&b, &a, &cfg).unwrap());
        }
    }

    #[test]
    fn weber_term() {
        assert_eq!(weber_luminance_term(0.0, 0.37), 1.0);
        assert!((weber_luminance_term(0.1, 0.0) - 2.2 / 2.21).abs() < 1e-15);
        assert!((weber_luminance_term(0.1, 0.0) - 0.995475).abs() < 1e-6);
    }

    #[test]
    fn weber_consistency_on_constant_pairs() {
        let cfg = SsimConfig::default();
        for (mu1, lambda) in [(50.0, 0.1), (128.0, -0.2), (20.0, 0.5)] {
            let mu2: f64 = mu1 * (1.0 + lambda);
            let a = Plane::filled(12, 12, mu1).unwrap();
            let b = Plane::filled(12, 12, mu2).unwrap();
            let maps = ssim_map(&a, &b, &cfg).unwrap();
            // l evaluated from the actual pair, rewritten in relative form
            let lam = mu2 / mu1 - 1.0;
            let w = weber_luminance_term(lam, cfg.c1() / (mu1 * mu1));
            for &l in maps.l_map.values() {
                assert!((l - w).abs() < 1e-12, "{l} vs {w}");
            }
        }
    }

    #[test]
    fn empty_map_rejected() {
        let m = QualityMap::from_values(vec![]);
        let maps = SsimTermMaps {
            l_map: m.clone(),
            cs_map: m.clone(),
            q_map: m,
        };
        assert!(matches!(mssim(&maps), Err(Error::EmptyMap)));
    }

    #[test]
    fn mean_of_two() {
        let m = QualityMap::from_values(vec![0.5, 1.0]);
        let maps = SsimTermMaps {
            l_map: m.clone(),
            cs_map: m.clone(),
            q_map: m,
        };
        assert_eq!(mssim(&maps).unwrap(), 0.75);
    }

    #[test]
    fn naive_engine_agrees_with_integral() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_plane(&mut rng, 24, 24);
        let b = random_plane(&mut rng, 24, 24);
        let mut cfg = SsimConfig::default();
        cfg.engine = Engine::Naive;
        let n = ssim_map(&a, &b, &cfg).unwrap();
        cfg.engine = Engine::Integral;
        let i = ssim_map(&a, &b, &cfg).unwrap();
        for (x, y) in n.q_map.values().iter().zip(i.q_map.values()) {
            assert!((x - y).abs() <= 1e-8 * x.abs().max(y.abs()));
        }
    }
}
