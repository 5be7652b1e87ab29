//! Frequency-domain diagnostics: luma conversion, cross-difference
//! high-pass, spectral fingerprints, radial power spectra and Haar
//! per-scale energies.

pub mod fft;
pub mod fingerprint;
pub mod haar;
pub mod radial;

use crate::error::{Error, Result};
use crate::imgcore::{Plane, RasterImage};

pub use fingerprint::{
    fingerprint, fingerprint_par, image_spectrum, spectral_mse, FingerprintAccumulator,
    FingerprintConfig, SpectralFingerprint, DEFAULT_FINGERPRINT_SIZE,
};
pub use haar::{haar_energies, haar_energies_cropped, ScaleEnergy, WaveletEnergyProfile};
pub use radial::{mean_psd, radial_psd, RadialPsd, HIGH_BAND_CUTOFF};

/// Rec.601 luma; single-channel input passes through unchanged.
pub fn to_luma(img: &RasterImage) -> RasterImage {
    if img.channels() == 1 {
        return img.clone();
    }
    let data = img
        .data()
        .chunks_exact(3)
        .map(|p| (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]).clamp(0.0, 1.0))
        .collect();
    RasterImage::new(img.width(), img.height(), 1, data).expect("luma stays in range")
}

/// `|I(i,j) - I(i+1,j) - I(i,j+1) + I(i+1,j+1)|`, one pixel smaller in each direction.
pub fn cross_difference(p: &Plane) -> Result<Plane> {
    if p.width < 2 || p.height < 2 {
        return Err(Error::param(format!(
            "cross-difference needs at least 2x2 pixels, got {}x{}",
            p.width, p.height
        )));
    }
    Ok(Plane::from_fn(p.width - 1, p.height - 1, |x, y| {
        (p.get(x, y) - p.get(x + 1, y) - p.get(x, y + 1) + p.get(x + 1, y + 1)).abs()
    }))
}

/// Cross-difference of the luma of `img`.
pub fn high_pass(img: &RasterImage) -> Result<Plane> {
    cross_difference(&to_luma(img).plane(0))
}
