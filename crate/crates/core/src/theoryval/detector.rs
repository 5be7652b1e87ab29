//! Frequency-oracle detector: flags images whose high-band power falls
//! below that of calibration reals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::RasterImage;
use crate::spectra::{radial_psd, to_luma, HIGH_BAND_CUTOFF};

pub const ORACLE_BINS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyOracle {
    pub cutoff: f64,
    pub n_bins: usize,
    /// Mean high-band power of the calibration reals.
    pub reference: f64,
}

impl FrequencyOracle {
    pub fn calibrate(reals: &[RasterImage]) -> Result<Self> {
        if reals.is_empty() {
            return Err(Error::Empty("no calibration images".into()));
        }
        let mut oracle = FrequencyOracle {
            cutoff: HIGH_BAND_CUTOFF,
            n_bins: ORACLE_BINS,
            reference: 1.0,
        };
        let total = reals
            .iter()
            .map(|img| oracle.high_band_power(img))
            .sum::<Result<f64>>()?;
        let reference = total / reals.len() as f64;
        if reference.is_nan() || reference <= 0.0 {
            return Err(Error::Undefined("calibration reals carry no high-band power".into()));
        }
        oracle.reference = reference;
        Ok(oracle)
    }

    pub fn high_band_power(&self, img: &RasterImage) -> Result<f64> {
        Ok(radial_psd(&to_luma(img).plane(0), self.n_bins)?.band_power(self.cutoff))
    }

    /// `1 - p / (p + reference)`: 0.5 at the calibration level, towards 1
    /// for images stripped of high frequencies.
    pub fn score(&self, img: &RasterImage) -> Result<f64> {
        let p = self.high_band_power(img)?;
        Ok(self.reference / (p + self.reference))
    }
}
