//! Quaternion SSIM. A pixel `(a, b, c)` is the pure quaternion
//! `a i + b j + c k`; means, contrasts and the correlation are taken per
//! window and the per-window moduli averaged.

use crate::config::SsimConfig;
use crate::error::{Error, Result};
use crate::model::{check_dims, ColorFrame, Plane, QualityMap};
use crate::ssim::mean_of;
use crate::stats::local_mean;

use super::convert::upsample_chroma;

/// Per-window quaternion SSIM:
///
/// ```text
/// L = 2 mu_r conj(mu_d) + C1         (quaternion product)
/// C = 2 E[ac_r conj(ac_d)] + C2
/// q = |L| |C| / ((|mu_r|^2 + |mu_d|^2 + C1) (s_r^2 + s_d^2 + C2))
/// ```
///
/// with `s^2` the summed channel variances.
pub fn qssim_map(reference: &ColorFrame, distorted: &ColorFrame, config: &SsimConfig) -> Result<QualityMap> {
    check_dims(reference.width(), reference.height(), distorted.width(), distorted.height())?;
    if reference.space() != distorted.space() {
        return Err(Error::WrongSpace {
            expected: reference.space().name(),
            got: distorted.space().name(),
        });
    }
    let r = upsample_chroma(reference)?;
    let d = upsample_chroma(distorted)?;
    let window = &config.window;
    let mean = |p: &Plane| local_mean(p, window, config.engine);
    let product = |a: &Plane, b: &Plane| -> Result<QualityMap> { mean(&a.zip_map(b, |x, y| x * y)?) };

    let mr = [mean(r.plane(0))?, mean(r.plane(1))?, mean(r.plane(2))?];
    let md = [mean(d.plane(0))?, mean(d.plane(1))?, mean(d.plane(2))?];
    // cross[a][b] = E[d_a r_b]
    let mut cross: Vec<Vec<QualityMap>> = Vec::with_capacity(3);
    for a in 0..3 {
        let mut row = Vec::with_capacity(3);
        for b in 0..3 {
            row.push(product(d.plane(a), r.plane(b))?);
        }
        cross.push(row);
    }
    let sq_r = [
        product(r.plane(0), r.plane(0))?,
        product(r.plane(1), r.plane(1))?,
        product(r.plane(2), r.plane(2))?,
    ];
    let sq_d = [
        product(d.plane(0), d.plane(0))?,
        product(d.plane(1), d.plane(1))?,
        product(d.plane(2), d.plane(2))?,
    ];

    let (c1, c2) = (config.c1(), config.c2());
    let n = mr[0].len();
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let ur = [mr[0].values()[i], mr[1].values()[i], mr[2].values()[i]];
        let ud = [md[0].values()[i], md[1].values()[i], md[2].values()[i]];
        // cv[a][b] = cov(d_a, r_b)
        let cv = |a: usize, b: usize| cross[a][b].values()[i] - ud[a] * ur[b];

        let mean_real = 2.0 * dot(ur, ud) + c1;
        let mean_vec = cross3(ud, ur).map(|v| 2.0 * v);
        let l_mod = norm4(mean_real, mean_vec);

        let cov_real = 2.0 * (cv(0, 0) + cv(1, 1) + cv(2, 2)) + c2;
        let cov_vec = [
            2.0 * (cv(1, 2) - cv(2, 1)),
            2.0 * (cv(2, 0) - cv(0, 2)),
            2.0 * (cv(0, 1) - cv(1, 0)),
        ];
        let c_mod = norm4(cov_real, cov_vec);

        let var = |sq: &[QualityMap; 3], u: [f64; 3]| -> f64 {
            (0..3).map(|c| (sq[c].values()[i] - u[c] * u[c]).max(0.0)).sum()
        };
        let den_l = (dot(ur, ur) + dot(ud, ud)) + c1;
        let den_c = (var(&sq_r, ur) + var(&sq_d, ud)) + c2;
        values.push((l_mod * c_mod) / (den_l * den_c));
    }
    mr[0].with_values(values)
}

/// Mean of [`qssim_map`].
pub fn qssim(reference: &ColorFrame, distorted: &ColorFrame, config: &SsimConfig) -> Result<f64> {
    mean_of(&qssim_map(reference, distorted, config)?)
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm4(w: f64, v: [f64; 3]) -> f64 {
    (w * w + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
