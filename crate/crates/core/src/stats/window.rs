use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selector;

/// Window shape. Rectangular windows weigh every sample by `1/k^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WindowShape {
    Rectangular { k: usize },
    Gaussian { sigma: f64, k: usize },
}

/// Window shape plus the spacing between scored windows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct WindowSpec {
    pub shape: WindowShape,
    pub stride: usize,
}

impl WindowSpec {
    pub fn rectangular(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("window size must be at least 1".into()));
        }
        Ok(Self {
            shape: WindowShape::Rectangular { k },
            stride: 1,
        })
    }

    /// Gaussian window; `k` defaults to `2 * ceil(3 sigma) + 1`.
    pub fn gaussian(sigma: f64, k: Option<usize>) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::NonPositiveSigma(sigma));
        }
        let k = match k {
            Some(k) => k,
            None => default_gaussian_size(sigma),
        };
        if k < 3 || k % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "gaussian window size must be odd and >= 3, got {k}"
            )));
        }
        Ok(Self {
            shape: WindowShape::Gaussian { sigma, k },
            stride: 1,
        })
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        self.stride = stride;
        Ok(self)
    }

    pub fn size(&self) -> usize {
        match self.shape {
            WindowShape::Rectangular { k } | WindowShape::Gaussian { k, .. } => k,
        }
    }

    pub fn is_rectangular(&self) -> bool {
        matches!(self.shape, WindowShape::Rectangular { .. })
    }

    /// Row-major `k x k` weights summing to one.
    pub fn weights(&self) -> Vec<f64> {
        match self.shape {
            WindowShape::Rectangular { k } => vec![1.0 / (k * k) as f64; k * k],
            WindowShape::Gaussian { sigma, k } => {
                // validated at construction
                gaussian_kernel(sigma, Some(k)).expect("valid gaussian").weights
            }
        }
    }

    /// Shape without the stride, in selector syntax (`rect:11`, `gauss:1.5,k=11`).
    pub fn shape_selector(&self) -> String {
        match self.shape {
            WindowShape::Rectangular { k } => format!("rect:{k}"),
            WindowShape::Gaussian { sigma, k } => format!("gauss:{sigma},k={k}"),
        }
    }

    /// Parses a shape selector; the stride is left at 1.
    pub fn parse_shape(s: &str) -> Result<Self> {
        let sel = selector::Selector::parse(s)?;
        match sel.name.as_str() {
            "rect" => {
                let k = sel.positional_usize(0)?;
                sel.check_keys(&[])?;
                Self::rectangular(k)
            }
            "gauss" => {
                let sigma = sel.positional_f64(0)?;
                sel.check_keys(&["k"])?;
                let k = sel.opt_usize("k")?;
                Self::gaussian(sigma, k)
            }
            other => Err(selector::unknown(s, other)),
        }
    }
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            shape: WindowShape::Rectangular { k: 11 },
            stride: 1,
        }
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};stride={}", self.shape_selector(), self.stride)
    }
}

impl FromStr for WindowSpec {
    type Err = Error;

    /// Accepts `<shape>` or `<shape>;stride=<n>`.
    fn from_str(s: &str) -> Result<Self> {
        let (shape, stride) = match s.split_once(';') {
            Some((shape, rest)) => {
                let n = rest
                    .trim()
                    .strip_prefix("stride=")
                    .ok_or_else(|| selector::bad(s, "expected ;stride=<n>"))?;
                let n: usize = n.parse().map_err(|_| selector::bad(s, "bad stride"))?;
                (shape, n)
            }
            None => (s, 1),
        };
        Self::parse_shape(shape)?.with_stride(stride)
    }
}

impl TryFrom<String> for WindowSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WindowSpec> for String {
    fn from(w: WindowSpec) -> String {
        w.to_string()
    }
}

/// Normalized 2-D Gaussian weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    pub size: usize,
    pub weights: Vec<f64>,
}

impl Kernel {
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.size + col]
    }
}

pub(crate) fn default_gaussian_size(sigma: f64) -> usize {
    2 * (3.0 * sigma).ceil() as usize + 1
}

/// Normalized 1-D Gaussian taps centered in a window of `size`.
pub(crate) fn gaussian_1d(sigma: f64, size: usize) -> Vec<f64> {
    let center = (size as f64 - 1.0) / 2.0;
    let g: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - center;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = g.iter().sum();
    g.iter().map(|v| v / total).collect()
}

/// Separable Gaussian sampled at integer offsets from the center and
/// normalized to unit sum. `k` defaults to `2 * ceil(3 sigma) + 1`.
pub fn gaussian_kernel(sigma: f64, k: Option<usize>) -> Result<Kernel> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::NonPositiveSigma(sigma));
    }
    let size = k.unwrap_or_else(|| default_gaussian_size(sigma));
    if size == 0 {
        return Err(Error::InvalidParameter("kernel size 0".into()));
    }
    let g = gaussian_1d(sigma, size);
    let mut weights = Vec::with_capacity(size * size);
    for a in &g {
        for b in &g {
            weights.push(a * b);
        }
    }
    Ok(Kernel { size, weights })
}

/// How a rectangular window is matched to a Gaussian of given sigma.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RectEquivalence {
    SameSize,
    SameVariance,
    SameBandwidth,
}

/// Full size `2K + 1` of the rectangular window equivalent to a Gaussian.
///
/// Same variance: `K = ceil(sigma * sqrt(3))`. Same 3 dB bandwidth:
/// `K = ceil(1.602 sigma)`. Same size returns the Gaussian's default size.
pub fn rect_equivalent(sigma: f64, mode: RectEquivalence) -> Result<usize> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::NonPositiveSigma(sigma));
    }
    let half = match mode {
        RectEquivalence::SameSize => return Ok(default_gaussian_size(sigma)),
        RectEquivalence::SameVariance => (sigma * 3f64.sqrt()).ceil(),
        RectEquivalence::SameBandwidth => (1.602 * sigma).ceil(),
    };
    Ok(2 * half as usize + 1)
}
