//! SSIM-3D: local statistics over `k x k x K_t` spatio-temporal boxes,
//! kept current with rolling temporal sums so each frame costs O(MN)
//! regardless of `K_t`.

use std::collections::VecDeque;

use crate::config::SsimConfig;
use crate::error::{Error, Result};
use crate::model::{check_dims, Plane, ScoreSeries};
use crate::multiscale::{dyadic_downsample, min_dimension, MultiscaleSpec};
use crate::ssim::{mean_of, terms_from_stats, SsimTermMaps};
use crate::stats::{stats_from_integrals, IntegralSet, TableId, WindowShape};

/// Suggested temporal window.
pub const DEFAULT_KT: usize = 5;
/// Pushes between recomputations of the temporal sums from the buffer.
pub const REFRESH_INTERVAL: usize = 300;

/// What a [`RollingVolume`] currently holds, in planes and samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoryAccount {
    pub frame_pairs: usize,
    pub sum_planes: usize,
    pub samples: usize,
}

/// Ring buffer of the last `K_t` frame pairs plus the five temporal-sum
/// planes `sum I1`, `sum I2`, `sum I1^2`, `sum I2^2`, `sum I1 I2`.
#[derive(Clone, Debug)]
pub struct RollingVolume {
    kt: usize,
    width: usize,
    height: usize,
    buffer: VecDeque<(Plane, Plane)>,
    sums: [Vec<f64>; 5],
    pushes: usize,
}

fn quantities(a: f64, b: f64) -> [f64; 5] {
    [a, b, a * a, b * b, a * b]
}

impl RollingVolume {
    pub fn new(kt: usize, width: usize, height: usize) -> Result<Self> {
        if kt == 0 {
            return Err(Error::InvalidParameter("K_t must be >= 1".into()));
        }
        let n = width * height;
        Ok(Self {
            kt,
            width,
            height,
            buffer: VecDeque::with_capacity(kt),
            sums: std::array::from_fn(|_| vec![0.0; n]),
            pushes: 0,
        })
    }

    pub fn kt(&self) -> usize {
        self.kt
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Frames currently buffered (less than `K_t` during warm-up).
    pub fn buffered(&self) -> usize {
        self.buffer.len()
    }

    /// `T(k) = T(k-1) - I(k - K_t) + I(k)` for all five sums.
    pub fn push_frame(&mut self, reference: &Plane, distorted: &Plane) -> Result<()> {
        check_dims(self.width, self.height, reference.width(), reference.height())?;
        check_dims(self.width, self.height, distorted.width(), distorted.height())?;
        if self.buffer.len() == self.kt {
            let (old_a, old_b) = self.buffer.pop_front().expect("full buffer");
            for (i, (&a, &b)) in old_a.data().iter().zip(old_b.data()).enumerate() {
                for (s, q) in self.sums.iter_mut().zip(quantities(a, b)) {
                    s[i] -= q;
                }
            }
        }
        for (i, (&a, &b)) in reference.data().iter().zip(distorted.data()).enumerate() {
            for (s, q) in self.sums.iter_mut().zip(quantities(a, b)) {
                s[i] += q;
            }
        }
        self.buffer.push_back((reference.clone(), distorted.clone()));
        self.pushes += 1;
        if self.pushes % REFRESH_INTERVAL == 0 {
            self.recompute();
        }
        Ok(())
    }

    /// Rebuilds the sums from the buffered frames.
    pub fn recompute(&mut self) {
        for s in &mut self.sums {
            s.iter_mut().for_each(|v| *v = 0.0);
        }
        for (a, b) in &self.buffer {
            for (i, (&x, &y)) in a.data().iter().zip(b.data()).enumerate() {
                for (s, q) in self.sums.iter_mut().zip(quantities(x, y)) {
                    s[i] += q;
                }
            }
        }
    }

    /// One temporal-sum plane.
    pub fn sum_plane(&self, which: TableId) -> Result<Plane> {
        Plane::new(self.width, self.height, self.sums[which as usize].clone())
    }

    pub fn memory(&self) -> MemoryAccount {
        let frame_pairs = self.buffer.len();
        let sum_planes = self.sums.len();
        MemoryAccount {
            frame_pairs,
            sum_planes,
            samples: (2 * frame_pairs + sum_planes) * self.width * self.height,
        }
    }

    /// SSIM maps over `k x k x buffered` boxes with the constants and
    /// formulas of the 2-D index. Rectangular windows only.
    pub fn ssim3d_map(&self, config: &SsimConfig) -> Result<SsimTermMaps> {
        let k = match config.window.shape {
            WindowShape::Rectangular { k } => k,
            WindowShape::Gaussian { .. } => return Err(Error::GaussianNotSupported3D),
        };
        if self.buffer.is_empty() {
            return Err(Error::EmptySeries);
        }
        let planes = [
            self.sum_plane(TableId::First)?,
            self.sum_plane(TableId::Second)?,
            self.sum_plane(TableId::FirstSquared)?,
            self.sum_plane(TableId::SecondSquared)?,
            self.sum_plane(TableId::Cross)?,
        ];
        let set = IntegralSet::from_quantities(planes.each_ref())?;
        let stats = stats_from_integrals(&set, k, config.window.stride, self.buffer.len())?;
        terms_from_stats(&stats, config.c1(), config.c2())
    }
}

/// Per-frame MS-SSIM-3D scorer: one rolling volume per spatial scale.
#[derive(Clone, Debug)]
pub struct Ssim3dStream {
    config: SsimConfig,
    spec: MultiscaleSpec,
    kt: usize,
    volumes: Vec<RollingVolume>,
}

impl Ssim3dStream {
    pub fn new(kt: usize, spec: MultiscaleSpec, config: SsimConfig) -> Result<Self> {
        spec.validate()?;
        if !config.window.is_rectangular() {
            return Err(Error::GaussianNotSupported3D);
        }
        if kt == 0 {
            return Err(Error::InvalidParameter("K_t must be >= 1".into()));
        }
        Ok(Self {
            config,
            spec,
            kt,
            volumes: Vec::new(),
        })
    }

    pub fn volumes(&self) -> &[RollingVolume] {
        &self.volumes
    }

    /// Pushes one frame pair and returns its score.
    pub fn push(&mut self, reference: &Plane, distorted: &Plane) -> Result<f64> {
        check_dims(reference.width(), reference.height(), distorted.width(), distorted.height())?;
        let levels = self.spec.levels;
        if self.volumes.is_empty() {
            let needed = min_dimension(self.config.window.size(), levels);
            let have = reference.width().min(reference.height());
            if have < needed {
                return Err(Error::TooManyLevels { levels, needed, have });
            }
            let (mut w, mut h) = (reference.width(), reference.height());
            for _ in 0..levels {
                self.volumes.push(RollingVolume::new(self.kt, w, h)?);
                w /= 2;
                h /= 2;
            }
        }
        let mut a = reference.clone();
        let mut b = distorted.clone();
        let mut scores = Vec::with_capacity(levels);
        for level in 0..levels {
            let vol = &mut self.volumes[level];
            vol.push_frame(&a, &b)?;
            let maps = vol.ssim3d_map(&self.config)?;
            if level + 1 == levels {
                scores.push(mean_of(&maps.q_map)?);
            } else {
                scores.push(mean_of(&maps.cs_map)?);
                a = dyadic_downsample(&a)?;
                b = dyadic_downsample(&b)?;
            }
        }
        Ok(self.spec.aggregate(&scores))
    }
}

/// Scores every frame pair of a stream with MS-SSIM-3D. Frames before the
/// window fills are scored over the frames seen so far.
pub fn msssim3d<'a, I>(pairs: I, kt: usize, spec: &MultiscaleSpec, config: &SsimConfig) -> Result<ScoreSeries>
where
    I: IntoIterator<Item = (&'a Plane, &'a Plane)>,
{
    let mut stream = Ssim3dStream::new(kt, spec.clone(), config.clone())?;
    let mut series = ScoreSeries::new(Vec::new());
    for (a, b) in pairs {
        series.push(stream.push(a, b)?);
    }
    Ok(series)
}
