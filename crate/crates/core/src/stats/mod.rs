//! Windowed local statistics: window shapes, summed-area tables and the
//! naive and integral-image engines.

mod integral;
mod local;
mod window;

pub use integral::{build_integral_set, window_sum, IntegralSet, IntegralTable, TableId};
pub use local::{local_mean, local_statistics, Engine, LocalStatsMaps};
pub(crate) use local::stats_from_integrals;
pub(crate) use window::gaussian_1d;
pub use window::{gaussian_kernel, rect_equivalent, Kernel, RectEquivalence, WindowShape, WindowSpec};
