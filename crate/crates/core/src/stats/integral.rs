//! Summed-area tables for O(1) rectangular window sums.

use crate::error::{Error, Result};
use crate::model::{check_dims, Plane};

/// Summed-area table with a zero top row and left column: entry `(r, c)`
/// holds the sum of all samples in rows `< r` and columns `< c`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralTable {
    width: usize,
    height: usize,
    table: Vec<f64>,
}

impl IntegralTable {
    pub fn build(plane: &Plane) -> Self {
        Self::from_fn(plane.width(), plane.height(), |x, y| plane.get(x, y))
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let stride = width + 1;
        let mut table = vec![0.0; stride * (height + 1)];
        for y in 0..height {
            let mut row_sum = 0.0;
            for x in 0..width {
                row_sum += f(x, y);
                table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row_sum;
            }
        }
        Self {
            width,
            height,
            table,
        }
    }

    /// Source image width (the table is one wider).
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Table entry including the zero border; `(0, _)` and `(_, 0)` are zero.
    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.table[row * (self.width + 1) + col]
    }

    /// Sum over the `kh x kw` block whose top-left sample is `(row, col)`.
    #[inline]
    pub(crate) fn block_sum(&self, row: usize, col: usize, kh: usize, kw: usize) -> f64 {
        (self.at(row + kh, col + kw) + self.at(row, col))
            - (self.at(row, col + kw) + self.at(row + kh, col))
    }

    /// Checked `k x k` window sum.
    pub fn window_sum(&self, row: usize, col: usize, k: usize) -> Result<f64> {
        if k == 0 || row + k > self.height || col + k > self.width {
            return Err(Error::WindowOutOfBounds {
                row,
                col,
                k,
                width: self.width,
                height: self.height,
            });
        }
        Ok(self.block_sum(row, col, k, k))
    }
}

/// Which of the five tables of an [`IntegralSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableId {
    /// Sum of `I1`.
    First,
    /// Sum of `I2`.
    Second,
    /// Sum of `I1^2`.
    FirstSquared,
    /// Sum of `I2^2`.
    SecondSquared,
    /// Sum of `I1 * I2`.
    Cross,
}

/// The five summed-area tables needed for SSIM statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralSet {
    tables: [IntegralTable; 5],
}

impl IntegralSet {
    /// Tables over precomputed per-pixel quantities, in [`TableId`] order.
    /// Used directly by the spatio-temporal path, whose inputs are already
    /// temporal sums.
    pub fn from_quantities(q: [&Plane; 5]) -> Result<Self> {
        for p in &q[1..] {
            check_dims(q[0].width(), q[0].height(), p.width(), p.height())?;
        }
        Ok(Self {
            tables: q.map(IntegralTable::build),
        })
    }

    pub fn table(&self, which: TableId) -> &IntegralTable {
        &self.tables[which as usize]
    }

    pub fn width(&self) -> usize {
        self.tables[0].width
    }

    pub fn height(&self) -> usize {
        self.tables[0].height
    }

    pub(crate) fn tables(&self) -> &[IntegralTable; 5] {
        &self.tables
    }
}

/// Builds the five tables for an image pair.
pub fn build_integral_set(first: &Plane, second: &Plane) -> Result<IntegralSet> {
    check_dims(first.width(), first.height(), second.width(), second.height())?;
    let (w, h) = (first.width(), first.height());
    let tables = [
        IntegralTable::build(first),
        IntegralTable::build(second),
        IntegralTable::from_fn(w, h, |x, y| {
            let v = first.get(x, y);
            v * v
        }),
        IntegralTable::from_fn(w, h, |x, y| {
            let v = second.get(x, y);
            v * v
        }),
        IntegralTable::from_fn(w, h, |x, y| first.get(x, y) * second.get(x, y)),
    ];
    Ok(IntegralSet { tables })
}

/// `k x k` window sum of one table; `(row, col)` is the window's top-left sample.
pub fn window_sum(set: &IntegralSet, which: TableId, row: usize, col: usize, k: usize) -> Result<f64> {
    set.table(which).window_sum(row, col, k)
}
