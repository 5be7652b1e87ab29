//! Radially averaged power spectra.

use serde::{Deserialize, Serialize};

use super::fft::{fft2, signed_frequency};
use crate::error::{Error, Result};
use crate::imgcore::Plane;

/// Lower edge (cycles/pixel) of the noise-dominated high-frequency band.
pub const HIGH_BAND_CUTOFF: f64 = 0.25;

/// Mean periodogram power per radial-frequency annulus.
///
/// Bins split `[0, 0.5]` cycles/pixel evenly; corner frequencies beyond
/// Nyquist fall into the last bin. Power is `|F|² / N`, so white noise of
/// variance `σ²` has a flat profile at `σ²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPsd {
    /// `n_bins + 1` monotone edges from 0 to 0.5.
    pub edges: Vec<f64>,
    pub power: Vec<f64>,
    /// Frequency samples per bin; empty bins report zero power.
    pub counts: Vec<usize>,
}

impl RadialPsd {
    pub fn n_bins(&self) -> usize {
        self.power.len()
    }

    /// Indices of bins lying entirely at or above `cutoff`.
    pub fn bins_above(&self, cutoff: f64) -> Vec<usize> {
        (0..self.n_bins())
            .filter(|&i| self.edges[i] >= cutoff - 1e-12 && self.counts[i] > 0)
            .collect()
    }

    /// Sample-weighted mean power over bins at or above `cutoff`.
    pub fn band_power(&self, cutoff: f64) -> f64 {
        let bins = self.bins_above(cutoff);
        let n: usize = bins.iter().map(|&i| self.counts[i]).sum();
        if n == 0 {
            return 0.0;
        }
        bins.iter()
            .map(|&i| self.power[i] * self.counts[i] as f64)
            .sum::<f64>()
            / n as f64
    }
}

/// Radially averaged `|FFT|² / N` in `n_bins` annuli.
pub fn radial_psd(p: &Plane, n_bins: usize) -> Result<RadialPsd> {
    if n_bins < 2 {
        return Err(Error::param(format!("need at least 2 radial bins, got {n_bins}")));
    }
    if p.width < 2 || p.height < 2 {
        return Err(Error::param(format!(
            "radial spectrum needs at least 2x2 pixels, got {}x{}",
            p.width, p.height
        )));
    }
    let (w, h) = (p.width, p.height);
    let n = (w * h) as f64;
    let f = fft2(p);
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    for ky in 0..h {
        let fy = signed_frequency(ky, h);
        for kx in 0..w {
            let fx = signed_frequency(kx, w);
            let rho = (fx * fx + fy * fy).sqrt();
            let bin = ((rho / 0.5 * n_bins as f64).floor() as usize).min(n_bins - 1);
            sums[bin] += f[ky * w + kx].norm_sqr() / n;
            counts[bin] += 1;
        }
    }
    let power = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let edges = (0..=n_bins).map(|i| 0.5 * i as f64 / n_bins as f64).collect();
    Ok(RadialPsd {
        edges,
        power,
        counts,
    })
}

/// Element-wise mean of profiles with identical binning.
pub fn mean_psd(profiles: &[RadialPsd]) -> Result<RadialPsd> {
    let first = profiles
        .first()
        .ok_or_else(|| Error::Empty("no spectra to average".into()))?;
    let mut power = vec![0.0; first.n_bins()];
    for p in profiles {
        if p.edges != first.edges {
            return Err(Error::dims("radial spectra use different bins"));
        }
        for (a, b) in power.iter_mut().zip(&p.power) {
            *a += b;
        }
    }
    let k = profiles.len() as f64;
    power.iter_mut().for_each(|v| *v /= k);
    Ok(RadialPsd {
        edges: first.edges.clone(),
        power,
        counts: first.counts.clone(),
    })
}
