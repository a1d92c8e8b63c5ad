use serde::{Deserialize, Serialize};

use super::integral::{build_integral_set, IntegralSet, IntegralTable};
use super::window::WindowSpec;
use crate::error::{Error, Result};
use crate::model::{check_dims, grid_len, Plane, QualityMap};

/// Which path computes the window statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Integral images for rectangular windows, direct weighting otherwise.
    #[default]
    Auto,
    /// Direct weighted sums over every window.
    Naive,
    /// Summed-area tables; rectangular windows only.
    Integral,
}

/// Co-registered local statistics of an image pair.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalStatsMaps {
    pub mu1: QualityMap,
    pub mu2: QualityMap,
    pub var1: QualityMap,
    pub var2: QualityMap,
    pub cov: QualityMap,
}

fn check_fit(width: usize, height: usize, k: usize) -> Result<()> {
    if k > width || k > height {
        return Err(Error::WindowLargerThanImage { k, width, height });
    }
    Ok(())
}

fn resolve(engine: Engine, window: &WindowSpec) -> Result<Engine> {
    match (engine, window.is_rectangular()) {
        (Engine::Integral, false) => Err(Error::EngineShapeMismatch),
        (Engine::Auto, true) => Ok(Engine::Integral),
        (Engine::Auto, false) => Ok(Engine::Naive),
        (e, _) => Ok(e),
    }
}

/// Window positions (top-left corners) along one axis.
fn positions(dim: usize, k: usize, stride: usize) -> impl Iterator<Item = usize> + Clone {
    (0..grid_len(dim, k, stride)).map(move |i| i * stride)
}

/// Raw moments `(m1, m2, m11, m22, m12)` to the five maps; variances are
/// clamped at zero and the covariance to the Cauchy-Schwarz bound.
pub(crate) fn finalize(
    moments: Vec<[f64; 5]>,
    dims: (usize, usize),
    k: usize,
    stride: usize,
) -> Result<LocalStatsMaps> {
    let n = moments.len();
    let (mut mu1, mut mu2, mut var1, mut var2, mut cov) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for [m1, m2, m11, m22, m12] in moments {
        let v1 = (m11 - m1 * m1).max(0.0);
        let v2 = (m22 - m2 * m2).max(0.0);
        let bound = (v1 * v2).sqrt();
        let c = (m12 - m1 * m2).clamp(-bound, bound);
        mu1.push(m1);
        mu2.push(m2);
        var1.push(v1);
        var2.push(v2);
        cov.push(c);
    }
    let map = |v| QualityMap::new(v, dims, k, stride);
    Ok(LocalStatsMaps {
        mu1: map(mu1)?,
        mu2: map(mu2)?,
        var1: map(var1)?,
        var2: map(var2)?,
        cov: map(cov)?,
    })
}

/// Window means from an integral set whose tables hold sums over `count`
/// samples per pixel (1 for plain images, the buffered frame count for
/// temporal sums).
pub(crate) fn stats_from_integrals(
    set: &IntegralSet,
    k: usize,
    stride: usize,
    count: usize,
) -> Result<LocalStatsMaps> {
    let (w, h) = (set.width(), set.height());
    check_fit(w, h, k)?;
    let norm = (k * k) as f64 * count as f64;
    let tables = set.tables();
    let mut moments = Vec::with_capacity(grid_len(w, k, stride) * grid_len(h, k, stride));
    for row in positions(h, k, stride) {
        for col in positions(w, k, stride) {
            moments.push(tables.each_ref().map(|t| t.block_sum(row, col, k, k) / norm));
        }
    }
    finalize(moments, (w, h), k, stride)
}

fn naive_moments(first: &Plane, second: &Plane, window: &WindowSpec) -> Vec<[f64; 5]> {
    let k = window.size();
    let weights = window.weights();
    let (w, h) = (first.width(), first.height());
    let mut out = Vec::with_capacity(grid_len(w, k, window.stride) * grid_len(h, k, window.stride));
    for row in positions(h, k, window.stride) {
        for col in positions(w, k, window.stride) {
            let mut m = [0.0; 5];
            for dy in 0..k {
                let r1 = &first.row(row + dy)[col..col + k];
                let r2 = &second.row(row + dy)[col..col + k];
                let wr = &weights[dy * k..(dy + 1) * k];
                for ((&a, &b), &wt) in r1.iter().zip(r2).zip(wr) {
                    m[0] += wt * a;
                    m[1] += wt * b;
                    m[2] += wt * (a * a);
                    m[3] += wt * (b * b);
                    m[4] += wt * (a * b);
                }
            }
            out.push(m);
        }
    }
    out
}

/// Windowed means, variances and covariance of an image pair over the valid
/// region, sampled every `window.stride` pixels.
pub fn local_statistics(
    first: &Plane,
    second: &Plane,
    window: &WindowSpec,
    engine: Engine,
) -> Result<LocalStatsMaps> {
    check_dims(first.width(), first.height(), second.width(), second.height())?;
    let engine = resolve(engine, window)?;
    let (w, h) = (first.width(), first.height());
    let k = window.size();
    check_fit(w, h, k)?;
    match engine {
        Engine::Integral => {
            let set = build_integral_set(first, second)?;
            stats_from_integrals(&set, k, window.stride, 1)
        }
        _ => finalize(naive_moments(first, second, window), (w, h), k, window.stride),
    }
}

/// Windowed weighted mean of a single plane on the same grid that
/// [`local_statistics`] uses.
pub fn local_mean(plane: &Plane, window: &WindowSpec, engine: Engine) -> Result<QualityMap> {
    let engine = resolve(engine, window)?;
    let (w, h) = (plane.width(), plane.height());
    let k = window.size();
    check_fit(w, h, k)?;
    let stride = window.stride;
    let mut values = Vec::with_capacity(grid_len(w, k, stride) * grid_len(h, k, stride));
    match engine {
        Engine::Integral => {
            let t = IntegralTable::build(plane);
            let norm = (k * k) as f64;
            for row in positions(h, k, stride) {
                for col in positions(w, k, stride) {
                    values.push(t.block_sum(row, col, k, k) / norm);
                }
            }
        }
        _ => {
            let weights = window.weights();
            for row in positions(h, k, stride) {
                for col in positions(w, k, stride) {
                    let mut s = 0.0;
                    for dy in 0..k {
                        let r = &plane.row(row + dy)[col..col + k];
                        for (&a, &wt) in r.iter().zip(&weights[dy * k..(dy + 1) * k]) {
                            s += wt * a;
                        }
                    }
                    values.push(s);
                }
            }
        }
    }
    QualityMap::new(values, (w, h), k, stride)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plane(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Plane {
        Plane::from_fn(w, h, |_, _| rng.gen_range(0..256) as f64).unwrap()
    }

    #[test]
    fn constant_images() {
        let a = Plane::filled(20, 15, 37.0).unwrap();
        let b = Plane::filled(20, 15, 200.0).unwrap();
        for engine in [Engine::Naive, Engine::Integral] {
            let s = local_statistics(&a, &b, &WindowSpec::default(), engine).unwrap();
            assert!(s.mu1.values().iter().all(|&v| (v - 37.0).abs() < 1e-12));
            assert!(s.mu2.values().iter().all(|&v| (v - 200.0).abs() < 1e-12));
            for m in [&s.var1, &s.var2, &s.cov] {
                assert!(m.values().iter().all(|&v| v.abs() < 1e-9));
            }
        }
    }

    #[test]
    fn self_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_plane(&mut rng, 24, 24);
        for engine in [Engine::Naive, Engine::Integral] {
            let s = local_statistics(&a, &a, &WindowSpec::default(), engine).unwrap();
            assert_eq!(s.var1, s.var2);
            assert_eq!(s.var1.values(), s.cov.values());
        }
    }

    #[test]
    fn integral_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_plane(&mut rng, 32, 32);
        let b = random_plane(&mut rng, 32, 32);
        let w = WindowSpec::rectangular(11).unwrap();
        let n = local_statistics(&a, &b, &w, Engine::Naive).unwrap();
        let i = local_statistics(&a, &b, &w, Engine::Integral).unwrap();
        for (x, y) in [
            (&n.mu1, &i.mu1),
            (&n.mu2, &i.mu2),
            (&n.var1, &i.var1),
            (&n.var2, &i.var2),
            (&n.cov, &i.cov),
        ] {
            for (p, q) in x.values().iter().zip(y.values()) {
                assert!((p - q).abs() <= 1e-8 * p.abs().max(q.abs()), "{p} vs {q}");
            }
        }
    }

    #[test]
    fn engine_shape_mismatch() {
        let a = Plane::filled(16, 16, 1.0).unwrap();
        let g = WindowSpec::gaussian(1.5, None).unwrap();
        assert!(matches!(
            local_statistics(&a, &a, &g, Engine::Integral),
            Err(Error::EngineShapeMismatch)
        ));
        assert!(local_statistics(&a, &a, &g, Engine::Auto).is_ok());
    }

    #[test]
    fn window_larger_than_image() {
        let a = Plane::filled(10, 30, 1.0).unwrap();
        assert!(matches!(
            local_statistics(&a, &a, &WindowSpec::default(), Engine::Auto),
            Err(Error::WindowLargerThanImage { .. })
        ));
    }

    #[test]
    fn identity_kernel_reproduces_samples() {
        // A 3x3 Gaussian with a tiny sigma is numerically a delta.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_plane(&mut rng, 12, 9);
        let w = WindowSpec::gaussian(0.05, Some(3)).unwrap();
        let s = local_statistics(&a, &a, &w, Engine::Naive).unwrap();
        for r in 0..s.mu1.rows() {
            for c in 0..s.mu1.cols() {
                assert_eq!(s.mu1.get(c, r), a.get(c + 1, r + 1));
            }
        }
    }

    #[test]
    fn local_mean_matches_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_plane(&mut rng, 20, 20);
        for w in [
            WindowSpec::rectangular(5).unwrap().with_stride(2).unwrap(),
            WindowSpec::gaussian(1.0, None).unwrap(),
        ] {
            let s = local_statistics(&a, &a, &w, Engine::Auto).unwrap();
            let m = local_mean(&a, &w, Engine::Auto).unwrap();
            assert_eq!(m, s.mu1);
        }
    }
}
