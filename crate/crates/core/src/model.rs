//! Shared rasters, maps and series.
//!
//! Media is ingested as integer samples ([`LumaPlane`]) and promoted to
//! `f64` ([`Plane`]) at the boundary of every statistics operation. All types
//! validate their invariants on construction and are immutable afterwards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-channel integer raster as read from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LumaPlane {
    width: usize,
    height: usize,
    bit_depth: u8,
    samples: Vec<u16>,
}

impl LumaPlane {
    pub fn new(width: usize, height: usize, bit_depth: u8, samples: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidPlane(format!("empty plane {width}x{height}")));
        }
        if !(8..=16).contains(&bit_depth) {
            return Err(Error::InvalidPlane(format!("bit depth {bit_depth} outside 8..=16")));
        }
        if samples.len() != width * height {
            return Err(Error::InvalidPlane(format!(
                "{} samples for a {width}x{height} plane",
                samples.len()
            )));
        }
        let peak = peak_value(bit_depth);
        if let Some(bad) = samples.iter().find(|&&s| f64::from(s) > peak) {
            return Err(Error::InvalidPlane(format!(
                "sample {bad} exceeds {peak} for {bit_depth}-bit"
            )));
        }
        Ok(Self {
            width,
            height,
            bit_depth,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    /// Nominal dynamic range `2^bit_depth - 1`.
    pub fn peak(&self) -> f64 {
        peak_value(self.bit_depth)
    }

    pub fn to_plane(&self) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.samples.iter().map(|&s| f64::from(s)).collect(),
        }
    }
}

/// `2^bit_depth - 1`.
pub fn peak_value(bit_depth: u8) -> f64 {
    ((1u32 << bit_depth) - 1) as f64
}

/// Row-major `f64` raster; the working type of every statistics operation.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidPlane(format!("empty plane {width}x{height}")));
        }
        if data.len() != width * height {
            return Err(Error::InvalidPlane(format!(
                "{} samples for a {width}x{height} plane",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPlane("non-finite sample".into()));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Elementwise combination of two equally sized planes.
    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Result<Plane> {
        check_dims(self.width, self.height, other.width, other.height)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Plane::new(self.width, self.height, data)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Plane> {
        Plane::new(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }

    /// Round and clamp back to integer samples.
    pub fn to_luma(&self, bit_depth: u8) -> Result<LumaPlane> {
        let peak = peak_value(bit_depth);
        let samples = self
            .data
            .iter()
            .map(|v| v.round().clamp(0.0, peak) as u16)
            .collect();
        LumaPlane::new(self.width, self.height, bit_depth, samples)
    }
}

pub(crate) fn check_dims(w1: usize, h1: usize, w2: usize, h2: usize) -> Result<()> {
    if w1 != w2 || h1 != h2 {
        return Err(Error::DimensionMismatch {
            left_w: w1,
            left_h: h1,
            right_w: w2,
            right_h: h2,
        });
    }
    Ok(())
}

/// Returns the pair if dimensions and bit depth agree.
pub fn validate_frame_pair<'a>(
    reference: &'a LumaPlane,
    distorted: &'a LumaPlane,
) -> Result<(&'a LumaPlane, &'a LumaPlane)> {
    check_dims(
        reference.width,
        reference.height,
        distorted.width,
        distorted.height,
    )?;
    if reference.bit_depth != distorted.bit_depth {
        return Err(Error::BitDepthMismatch(
            reference.bit_depth,
            distorted.bit_depth,
        ));
    }
    Ok((reference, distorted))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColorSpace {
    Rgb,
    YCbCrBt709,
    Xyz,
    CieLab,
    Hsv,
    Q1Q2Q3,
}

impl ColorSpace {
    pub fn name(self) -> &'static str {
        match self {
            ColorSpace::Rgb => "RGB",
            ColorSpace::YCbCrBt709 => "YCbCr-BT709",
            ColorSpace::Xyz => "XYZ",
            ColorSpace::CieLab => "CIELAB",
            ColorSpace::Hsv => "HSV",
            ColorSpace::Q1Q2Q3 => "Q1Q2Q3",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChromaSubsampling {
    Cs444,
    Cs420,
}

impl ChromaSubsampling {
    /// Chroma plane dimensions for a luma plane of `width` x `height`.
    pub fn chroma_dims(self, width: usize, height: usize) -> (usize, usize) {
        match self {
            ChromaSubsampling::Cs444 => (width, height),
            ChromaSubsampling::Cs420 => (width.div_ceil(2), height.div_ceil(2)),
        }
    }
}

/// Three co-sited channels with a color-space tag.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorFrame {
    planes: [Plane; 3],
    bit_depth: u8,
    space: ColorSpace,
    chroma: ChromaSubsampling,
}

impl ColorFrame {
    pub fn new(
        planes: [Plane; 3],
        bit_depth: u8,
        space: ColorSpace,
        chroma: ChromaSubsampling,
    ) -> Result<Self> {
        if !(8..=16).contains(&bit_depth) {
            return Err(Error::InvalidPlane(format!("bit depth {bit_depth} outside 8..=16")));
        }
        let (w, h) = (planes[0].width, planes[0].height);
        let (cw, ch) = chroma.chroma_dims(w, h);
        for p in &planes[1..] {
            if p.width != cw || p.height != ch {
                return Err(Error::InvalidPlane(format!(
                    "chroma plane {}x{} does not match {:?} of {w}x{h}",
                    p.width, p.height, chroma
                )));
            }
        }
        Ok(Self {
            planes,
            bit_depth,
            space,
            chroma,
        })
    }

    pub fn planes(&self) -> &[Plane; 3] {
        &self.planes
    }

    pub fn into_planes(self) -> [Plane; 3] {
        self.planes
    }

    pub fn plane(&self, idx: usize) -> &Plane {
        &self.planes[idx]
    }

    pub fn width(&self) -> usize {
        self.planes[0].width
    }

    pub fn height(&self) -> usize {
        self.planes[0].height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn peak(&self) -> f64 {
        peak_value(self.bit_depth)
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn chroma(&self) -> ChromaSubsampling {
        self.chroma
    }

    pub(crate) fn expect_space(&self, expected: ColorSpace) -> Result<()> {
        if self.space != expected {
            return Err(Error::WrongSpace {
                expected: expected.name(),
                got: self.space.name(),
            });
        }
        Ok(())
    }
}

/// Number of window positions along an axis of length `dim` for a window of
/// size `k` sampled every `stride` pixels (valid region only).
pub fn grid_len(dim: usize, k: usize, stride: usize) -> usize {
    if k > dim || stride == 0 {
        0
    } else {
        (dim - k) / stride + 1
    }
}

/// Grid of local scores. Entry `(r, c)` belongs to the window whose top-left
/// sample is `(origin_x + c * stride, origin_y + r * stride)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityMap {
    values: Vec<f64>,
    cols: usize,
    rows: usize,
    origin_x: usize,
    origin_y: usize,
    stride: usize,
    window: usize,
    source_dims: (usize, usize),
}

impl QualityMap {
    /// Builds a map for a `window`-sized window swept with `stride` over a
    /// `source_dims` image, checking the grid arithmetic.
    pub fn new(
        values: Vec<f64>,
        source_dims: (usize, usize),
        window: usize,
        stride: usize,
    ) -> Result<Self> {
        let cols = grid_len(source_dims.0, window, stride);
        let rows = grid_len(source_dims.1, window, stride);
        if values.len() != cols * rows {
            return Err(Error::InvalidParameter(format!(
                "{} values for a {cols}x{rows} grid",
                values.len()
            )));
        }
        Ok(Self {
            values,
            cols,
            rows,
            origin_x: 0,
            origin_y: 0,
            stride,
            window,
            source_dims,
        })
    }

    /// A map with no source geometry, e.g. for pooling arbitrary values.
    pub fn from_values(values: Vec<f64>) -> Self {
        let n = values.len();
        Self {
            values,
            cols: n,
            rows: usize::from(n > 0),
            origin_x: 0,
            origin_y: 0,
            stride: 1,
            window: 1,
            source_dims: (n, usize::from(n > 0)),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn origin(&self) -> (usize, usize) {
        (self.origin_x, self.origin_y)
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn source_dims(&self) -> (usize, usize) {
        self.source_dims
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    /// Same geometry, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for a map of {}",
                values.len(),
                self.values.len()
            )));
        }
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    pub fn same_geometry(&self, other: &QualityMap) -> bool {
        self.cols == other.cols
            && self.rows == other.rows
            && self.origin_x == other.origin_x
            && self.origin_y == other.origin_y
            && self.stride == other.stride
            && self.source_dims == other.source_dims
    }

    /// Every `step`-th entry along both axes.
    pub fn subsample(&self, step: usize) -> Result<Self> {
        if step == 0 {
            return Err(Error::InvalidParameter("subsample step 0".into()));
        }
        let mut values = Vec::new();
        for r in (0..self.rows).step_by(step) {
            for c in (0..self.cols).step_by(step) {
                values.push(self.get(c, r));
            }
        }
        Self::new(values, self.source_dims, self.window, self.stride * step)
    }
}

/// Per-frame scores in temporal order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreSeries {
    scores: Vec<f64>,
    frame_rate: Option<f64>,
}

impl ScoreSeries {
    pub fn new(scores: Vec<f64>) -> Self {
        Self {
            scores,
            frame_rate: None,
        }
    }

    pub fn with_frame_rate(mut self, fps: f64) -> Self {
        self.frame_rate = Some(fps);
        self
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn frame_rate(&self) -> Option<f64> {
        self.frame_rate
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn push(&mut self, score: f64) {
        self.scores.push(score);
    }
}

impl From<Vec<f64>> for ScoreSeries {
    fn from(scores: Vec<f64>) -> Self {
        Self::new(scores)
    }
}
