//! Color-space conversions between tagged frames.

use crate::error::Result;
use crate::model::{ChromaSubsampling, ColorFrame, ColorSpace, Plane};
use crate::stats::gaussian_1d;

/// BT.709 luma weights for R, G, B.
pub const BT709_LUMA: [f64; 3] = [0.213, 0.715, 0.072];
/// Scale of `B - Y` in Cb.
pub const BT709_CB: f64 = 0.539;
/// Scale of `R - Y` in Cr.
pub const BT709_CR: f64 = 0.635;

/// Linear BT.709 RGB (D65) to CIE XYZ.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

/// XYZ to the opponent space (luminance, red-green, blue-yellow).
pub const XYZ_TO_Q: [[f64; 3]; 3] = [
    [0.279, 0.72, -0.107],
    [-0.449, 0.29, -0.077],
    [0.086, -0.59, 0.501],
];

/// Opponent space back to XYZ.
pub const Q_TO_XYZ: [[f64; 3]; 3] = [
    [0.6204, -1.8704, -0.1553],
    [1.3661, 0.9316, 0.4339],
    [1.5013, 1.4176, 2.5331],
];

/// Gaussian used to smooth the opponent chroma channels.
pub const CHROMA_SMOOTHING_SIGMA: f64 = 2.0;
pub const CHROMA_SMOOTHING_SIZE: usize = 13;

/// Offset added to Cb/Cr for storage: half the dynamic range.
pub fn chroma_offset(peak: f64) -> f64 {
    peak / 2.0
}

fn apply_matrix(m: &[[f64; 3]; 3], planes: [&Plane; 3]) -> Result<[Plane; 3]> {
    let (w, h) = (planes[0].width(), planes[0].height());
    let row = |r: usize| {
        Plane::from_fn(w, h, |x, y| {
            m[r][0] * planes[0].get(x, y) + m[r][1] * planes[1].get(x, y) + m[r][2] * planes[2].get(x, y)
        })
    };
    Ok([row(0)?, row(1)?, row(2)?])
}

/// `Y = 0.213 R + 0.715 G + 0.072 B`, `Cb = 0.539 (B - Y)`,
/// `Cr = 0.635 (R - Y)`, chroma offset by `L / 2`. Output is 4:4:4.
pub fn rgb_to_ycbcr_bt709(frame: &ColorFrame) -> Result<ColorFrame> {
    frame.expect_space(ColorSpace::Rgb)?;
    let [r, g, b] = frame.planes();
    let off = chroma_offset(frame.peak());
    let y = Plane::from_fn(r.width(), r.height(), |x, yy| {
        BT709_LUMA[0] * r.get(x, yy) + BT709_LUMA[1] * g.get(x, yy) + BT709_LUMA[2] * b.get(x, yy)
    })?;
    let cb = b.zip_map(&y, |b, y| BT709_CB * (b - y) + off)?;
    let cr = r.zip_map(&y, |r, y| BT709_CR * (r - y) + off)?;
    ColorFrame::new(
        [y, cb, cr],
        frame.bit_depth(),
        ColorSpace::YCbCrBt709,
        ChromaSubsampling::Cs444,
    )
}

/// Nearest-neighbour chroma upsampling of a 4:2:0 frame to 4:4:4.
pub fn upsample_chroma(frame: &ColorFrame) -> Result<ColorFrame> {
    if frame.chroma() == ChromaSubsampling::Cs444 {
        return Ok(frame.clone());
    }
    let (w, h) = (frame.width(), frame.height());
    let up = |p: &Plane| Plane::from_fn(w, h, |x, y| p.get(x / 2, y / 2));
    ColorFrame::new(
        [frame.plane(0).clone(), up(frame.plane(1))?, up(frame.plane(2))?],
        frame.bit_depth(),
        frame.space(),
        ChromaSubsampling::Cs444,
    )
}

/// Inverse of [`rgb_to_ycbcr_bt709`]; 4:2:0 chroma is upsampled first.
pub fn ycbcr_to_rgb_bt709(frame: &ColorFrame) -> Result<ColorFrame> {
    frame.expect_space(ColorSpace::YCbCrBt709)?;
    let full = upsample_chroma(frame)?;
    let [y, cb, cr] = full.planes();
    let off = chroma_offset(frame.peak());
    let b = y.zip_map(cb, |y, cb| y + (cb - off) / BT709_CB)?;
    let r = y.zip_map(cr, |y, cr| y + (cr - off) / BT709_CR)?;
    let g = Plane::from_fn(y.width(), y.height(), |x, yy| {
        (y.get(x, yy) - BT709_LUMA[0] * r.get(x, yy) - BT709_LUMA[2] * b.get(x, yy)) / BT709_LUMA[1]
    })?;
    ColorFrame::new([r, g, b], frame.bit_depth(), ColorSpace::Rgb, ChromaSubsampling::Cs444)
}

/// Luma plane of a frame: BT.709 Y for RGB, plane 0 otherwise.
pub fn luma_of(frame: &ColorFrame) -> Result<Plane> {
    match frame.space() {
        ColorSpace::Rgb => Ok(rgb_to_ycbcr_bt709(frame)?.into_planes()[0].clone()),
        _ => Ok(frame.plane(0).clone()),
    }
}

/// RGB samples normalized by the dynamic range to linear XYZ.
pub fn rgb_to_xyz(frame: &ColorFrame) -> Result<ColorFrame> {
    frame.expect_space(ColorSpace::Rgb)?;
    let peak = frame.peak();
    let norm = frame
        .planes()
        .each_ref()
        .map(|p| p.map(|v| v / peak));
    let [r, g, b] = norm;
    let (r, g, b) = (r?, g?, b?);
    let xyz = apply_matrix(&RGB_TO_XYZ, [&r, &g, &b])?;
    ColorFrame::new(xyz, frame.bit_depth(), ColorSpace::Xyz, ChromaSubsampling::Cs444)
}

/// D65 white point implied by the RGB matrix (`RGB = 1, 1, 1`).
pub fn white_point() -> [f64; 3] {
    RGB_TO_XYZ.map(|row| row.iter().sum())
}

fn lab_f(t: f64) -> f64 {
    const D: f64 = 6.0 / 29.0;
    if t > D * D * D {
        t.cbrt()
    } else {
        t / (3.0 * D * D) + 4.0 / 29.0
    }
}

/// XYZ to CIELAB relative to [`white_point`].
pub fn xyz_to_lab(frame: &ColorFrame) -> Result<ColorFrame> {
    frame.expect_space(ColorSpace::Xyz)?;
    let [xn, yn, zn] = white_point();
    let [x, y, z] = frame.planes();
    let fx = x.map(|v| lab_f(v / xn))?;
    let fy = y.map(|v| lab_f(v / yn))?;
    let fz = z.map(|v| lab_f(v / zn))?;
    let l = fy.map(|f| 116.0 * f - 16.0)?;
    let a = fx.zip_map(&fy, |fx, fy| 500.0 * (fx - fy))?;
    let b = fy.zip_map(&fz, |fy, fz| 200.0 * (fy - fz))?;
    ColorFrame::new([l, a, b], frame.bit_depth(), ColorSpace::CieLab, ChromaSubsampling::Cs444)
}

pub fn rgb_to_lab(frame: &ColorFrame) -> Result<ColorFrame> {
    xyz_to_lab(&rgb_to_xyz(frame)?)
}

/// Separable convolution with edge replication; output has the input size.
pub(crate) fn smooth_replicate(plane: &Plane, taps: &[f64]) -> Result<Plane> {
    let (w, h) = (plane.width(), plane.height());
    let half = (taps.len() / 2) as isize;
    let clampi = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    let horiz = Plane::from_fn(w, h, |x, y| {
        taps.iter()
            .enumerate()
            .map(|(i, t)| t * plane.get(clampi(x as isize + i as isize - half, w), y))
            .sum()
    })?;
    Plane::from_fn(w, h, |x, y| {
        taps.iter()
            .enumerate()
            .map(|(i, t)| t * horiz.get(x, clampi(y as isize + i as isize - half, h)))
            .sum()
    })
}

/// RGB to CIELAB through the opponent space, smoothing the two chroma
/// channels with a Gaussian before converting back.
pub fn rgb_to_smoothed_lab(frame: &ColorFrame) -> Result<ColorFrame> {
    let xyz = rgb_to_xyz(frame)?;
    let [x, y, z] = xyz.planes();
    let [q1, q2, q3] = apply_matrix(&XYZ_TO_Q, [x, y, z])?;
    let taps = gaussian_1d(CHROMA_SMOOTHING_SIGMA, CHROMA_SMOOTHING_SIZE);
    let q2 = smooth_replicate(&q2, &taps)?;
    let q3 = smooth_replicate(&q3, &taps)?;
    let back = apply_matrix(&Q_TO_XYZ, [&q1, &q2, &q3])?;
    xyz_to_lab(&ColorFrame::new(
        back,
        frame.bit_depth(),
        ColorSpace::Xyz,
        ChromaSubsampling::Cs444,
    )?)
}

/// Hue in degrees `[0, 360)`; achromatic pixels get hue 0.
pub fn hue_degrees(r: f64, g: f64, b: f64) -> f64 {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    if delta == 0.0 {
        return 0.0;
    }
    let h = if max == r {
        60.0 * ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    if h >= 360.0 {
        h - 360.0
    } else {
        h
    }
}

/// RGB to HSV with every channel scaled to `[0, L]` (hue `h / 360 * L`,
/// saturation `s * L`, value as is).
pub fn rgb_to_hsv(frame: &ColorFrame) -> Result<ColorFrame> {
    frame.expect_space(ColorSpace::Rgb)?;
    let peak = frame.peak();
    let [r, g, b] = frame.planes();
    let (w, h) = (r.width(), r.height());
    let hue = Plane::from_fn(w, h, |x, y| hue_degrees(r.get(x, y), g.get(x, y), b.get(x, y)) / 360.0 * peak)?;
    let sat = Plane::from_fn(w, h, |x, y| {
        let (rr, gg, bb) = (r.get(x, y), g.get(x, y), b.get(x, y));
        let max = rr.max(gg).max(bb);
        if max == 0.0 {
            0.0
        } else {
            (max - rr.min(gg).min(bb)) / max * peak
        }
    })?;
    let val = Plane::from_fn(w, h, |x, y| r.get(x, y).max(g.get(x, y)).max(b.get(x, y)))?;
    ColorFrame::new([hue, sat, val], frame.bit_depth(), ColorSpace::Hsv, ChromaSubsampling::Cs444)
}
