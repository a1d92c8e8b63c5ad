use serde::{Deserialize, Serialize};

use crate::adaptation::ScalePolicy;
use crate::color::ColorModelSpec;
use crate::error::{Error, Result};
use crate::model::peak_value;
use crate::multiscale::MultiscaleSpec;
use crate::pooling::{SpatialPooler, TemporalPooler};
use crate::stats::{Engine, WindowSpec};

/// Everything that determines a scoring pipeline.
///
/// The saturation constants are derived: `C1 = (k1 L)^2`, `C2 = (k2 L)^2`,
/// `C3 = C2 / 2` with `L = 2^bit_depth - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsimConfig {
    pub k1: f64,
    pub k2: f64,
    pub bit_depth: u8,
    pub window: WindowSpec,
    #[serde(default)]
    pub engine: Engine,
    pub scaling: ScalePolicy,
    pub color: ColorModelSpec,
    pub spatial_pool: SpatialPooler,
    pub temporal_pool: TemporalPooler,
    pub multiscale: MultiscaleSpec,
}

impl Default for SsimConfig {
    fn default() -> Self {
        Self {
            k1: 0.01,
            k2: 0.03,
            bit_depth: 8,
            window: WindowSpec::default(),
            engine: Engine::Auto,
            scaling: ScalePolicy::None,
            color: ColorModelSpec::LumaOnly,
            spatial_pool: SpatialPooler::Am,
            temporal_pool: TemporalPooler::Am,
            multiscale: MultiscaleSpec::off(),
        }
    }
}

impl SsimConfig {
    pub fn with_bit_depth(mut self, bit_depth: u8) -> Self {
        self.bit_depth = bit_depth;
        self
    }

    pub fn with_window(mut self, window: WindowSpec) -> Self {
        self.window = window;
        self
    }

    pub fn peak(&self) -> f64 {
        peak_value(self.bit_depth)
    }

    pub fn c1(&self) -> f64 {
        (self.k1 * self.peak()).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (self.k2 * self.peak()).powi(2)
    }

    pub fn c3(&self) -> f64 {
        self.c2() / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k1 > 0.0 && self.k2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "k1 and k2 must be positive, got {} and {}",
                self.k1, self.k2
            )));
        }
        if !(8..=16).contains(&self.bit_depth) {
            return Err(Error::InvalidParameter(format!(
                "bit depth {} outside 8..=16",
                self.bit_depth
            )));
        }
        self.scaling.validate()?;
        self.color.validate()?;
        self.spatial_pool.validate()?;
        self.temporal_pool.validate()?;
        self.multiscale.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants() {
        let c = SsimConfig::default();
        assert!((c.c1() - 6.5025).abs() < 1e-12);
        assert!((c.c2() - 58.5225).abs() < 1e-12);
        assert_eq!(c.c3(), c.c2() / 2.0);
        let c10 = SsimConfig::default().with_bit_depth(10);
        assert!((c10.c1() - (0.01f64 * 1023.0).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_constants() {
        let c = SsimConfig {
            k1: 0.0,
            ..SsimConfig::default()
        };
        assert!(c.validate().is_err());
        assert!(SsimConfig::default().validate().is_ok());
    }
}
