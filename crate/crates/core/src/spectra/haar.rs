//! Orthonormal 2D Haar decomposition and per-scale detail energies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::Plane;

/// Detail energy of one decomposition level (`level = 1` is the finest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleEnergy {
    pub level: usize,
    /// Sum of squared LH, HL and HH coefficients at this level.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletEnergyProfile {
    /// Finest level first.
    pub levels: Vec<ScaleEnergy>,
    /// Energy left in the coarsest approximation band.
    pub approx_energy: f64,
    pub total_energy: f64,
    /// Set when the input had to be cropped to a power-of-two square.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl WaveletEnergyProfile {
    pub fn detail(&self, level: usize) -> Option<f64> {
        self.levels.iter().find(|s| s.level == level).map(|s| s.energy)
    }
}

/// One analysis step: returns the half-size approximation and the detail energy.
pub fn haar_step(p: &Plane) -> (Plane, f64) {
    let (w2, h2) = (p.width / 2, p.height / 2);
    let mut approx = Plane::zeros(w2, h2);
    let mut detail = 0.0;
    for y in 0..h2 {
        for x in 0..w2 {
            let a = p.get(2 * x, 2 * y);
            let b = p.get(2 * x + 1, 2 * y);
            let c = p.get(2 * x, 2 * y + 1);
            let d = p.get(2 * x + 1, 2 * y + 1);
            approx.set(x, y, (a + b + c + d) * 0.5);
            let lh = (a - b + c - d) * 0.5;
            let hl = (a + b - c - d) * 0.5;
            let hh = (a - b - c + d) * 0.5;
            detail += lh * lh + hl * hl + hh * hh;
        }
    }
    (approx, detail)
}

fn log2_exact(n: usize) -> Option<usize> {
    (n.is_power_of_two()).then(|| n.trailing_zeros() as usize)
}

/// Per-level detail energies of an orthonormal Haar DWT with `levels` steps.
///
/// Requires a square image whose side is `2^k` with `levels <= k`.
pub fn haar_energies(p: &Plane, levels: usize) -> Result<WaveletEnergyProfile> {
    if p.width != p.height {
        return Err(Error::param(format!(
            "haar analysis needs a square image, got {}x{}",
            p.width, p.height
        )));
    }
    let k = log2_exact(p.width).ok_or_else(|| {
        Error::param(format!("haar analysis needs a power-of-two side, got {}", p.width))
    })?;
    if levels > k {
        return Err(Error::param(format!(
            "{levels} levels requested but a {}-pixel side allows at most {k}",
            p.width
        )));
    }
    let total = p.energy();
    let mut current = p.clone();
    let mut out = Vec::with_capacity(levels);
    for level in 1..=levels {
        let (next, energy) = haar_step(&current);
        out.push(ScaleEnergy { level, energy });
        current = next;
    }
    Ok(WaveletEnergyProfile {
        levels: out,
        approx_energy: current.energy(),
        total_energy: total,
        warning: None,
    })
}

/// Like [`haar_energies`] but center-crops to the largest power-of-two square
/// first, recording a warning when it does so. `levels` is capped at the
/// available depth.
pub fn haar_energies_cropped(p: &Plane, levels: usize) -> Result<WaveletEnergyProfile> {
    let side = p.width.min(p.height);
    if side == 0 {
        return Err(Error::param("empty image"));
    }
    let pow = 1usize << (usize::BITS - 1 - side.leading_zeros());
    if pow == p.width && pow == p.height {
        return haar_energies(p, levels);
    }
    let (x0, y0) = ((p.width - pow) / 2, (p.height - pow) / 2);
    let cropped = p.crop(x0, y0, pow, pow);
    let depth = pow.trailing_zeros() as usize;
    let mut profile = haar_energies(&cropped, levels.min(depth))?;
    profile.warning = Some(format!(
        "center-cropped {}x{} to {pow}x{pow} for haar analysis",
        p.width, p.height
    ));
    Ok(profile)
}
