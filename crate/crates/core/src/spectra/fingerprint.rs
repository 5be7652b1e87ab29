//! Dataset-averaged spectral fingerprints of high-pass filtered images.

use serde::{Deserialize, Serialize};

use super::fft::{fft2, fftshift};
use super::{cross_difference, to_luma};
use crate::error::{Error, Result};
use crate::imgcore::resize::resize_bilinear;
use crate::imgcore::{Plane, RasterImage};

/// Side length every image is resampled to before analysis.
pub const DEFAULT_FINGERPRINT_SIZE: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintConfig {
    /// Square side to resample to; `None` analyses images at native size.
    pub resize_to: Option<usize>,
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        FingerprintConfig {
            resize_to: Some(DEFAULT_FINGERPRINT_SIZE),
        }
    }
}

/// Mean normalized magnitude spectrum with the DC bin centered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFingerprint {
    /// `(width, height)` in frequency bins.
    pub size: (usize, usize),
    /// Number of images averaged.
    pub count: u64,
    /// Row-major, fftshifted, nonnegative.
    pub magnitude: Vec<f64>,
}

impl SpectralFingerprint {
    /// Count-weighted mean of two fingerprints.
    pub fn merge(&self, other: &SpectralFingerprint) -> Result<SpectralFingerprint> {
        if self.size != other.size {
            return Err(Error::dims(format!(
                "fingerprint sizes {:?} and {:?} differ",
                self.size, other.size
            )));
        }
        let n = self.count + other.count;
        let (wa, wb) = (self.count as f64 / n as f64, other.count as f64 / n as f64);
        Ok(SpectralFingerprint {
            size: self.size,
            count: n,
            magnitude: self
                .magnitude
                .iter()
                .zip(&other.magnitude)
                .map(|(a, b)| a * wa + b * wb)
                .collect(),
        })
    }

    /// Log-scaled grayscale rendering for inspection (min→0, max→1).
    pub fn heatmap(&self) -> RasterImage {
        let logs: Vec<f64> = self.magnitude.iter().map(|m| (m + 1e-12).log10()).collect();
        let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        let data = logs.iter().map(|l| ((l - lo) / span).clamp(0.0, 1.0)).collect();
        RasterImage::new(self.size.0, self.size.1, 1, data).expect("heatmap samples are in range")
    }
}

/// Normalized magnitude spectrum of one image: luma, resample, cross-difference,
/// |FFT|, divide by the spectrum's own sum, fftshift.
///
/// A spectrum with zero total mass (constant input) stays all-zero.
pub fn image_spectrum(img: &RasterImage, config: &FingerprintConfig) -> Result<Plane> {
    let mut luma = to_luma(img).plane(0);
    if let Some(s) = config.resize_to {
        if s < 2 {
            return Err(Error::param("fingerprint size must be >= 2"));
        }
        luma = resize_bilinear(&luma, s, s);
    }
    let cd = cross_difference(&luma)?;
    let (w, h) = (cd.width, cd.height);
    let mag: Vec<f64> = fft2(&cd).iter().map(|c| c.norm()).collect();
    let total: f64 = mag.iter().sum();
    let normalized: Vec<f64> = if total > 0.0 {
        mag.iter().map(|m| m / total).collect()
    } else {
        mag
    };
    Plane::new(w, h, fftshift(&normalized, w, h))
}

/// Running `(sum, count)` of per-image spectra. Merging is associative and
/// commutative, so partial accumulators from parallel workers can be combined
/// in any order.
#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintAccumulator {
    config: FingerprintConfig,
    size: Option<(usize, usize)>,
    sum: Vec<f64>,
    count: u64,
}

impl FingerprintAccumulator {
    pub fn new(config: FingerprintConfig) -> Self {
        FingerprintAccumulator {
            config,
            size: None,
            sum: Vec::new(),
            count: 0,
        }
    }

    pub fn add(&mut self, img: &RasterImage) -> Result<()> {
        let spec = image_spectrum(img, &self.config)?;
        self.add_spectrum(&spec)
    }

    fn add_spectrum(&mut self, spec: &Plane) -> Result<()> {
        let size = (spec.width, spec.height);
        match self.size {
            None => {
                self.size = Some(size);
                self.sum = spec.data.clone();
            }
            Some(s) if s == size => {
                for (a, b) in self.sum.iter_mut().zip(&spec.data) {
                    *a += b;
                }
            }
            Some(s) => {
                return Err(Error::dims(format!(
                    "spectrum {size:?} does not match accumulated {s:?}; set a resize size"
                )))
            }
        }
        self.count += 1;
        Ok(())
    }

    pub fn merge(mut self, other: FingerprintAccumulator) -> Result<Self> {
        if other.count == 0 {
            return Ok(self);
        }
        if self.count == 0 {
            return Ok(other);
        }
        if self.size != other.size {
            return Err(Error::dims("accumulators differ in size"));
        }
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        self.count += other.count;
        Ok(self)
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn finish(self) -> Result<SpectralFingerprint> {
        let size = self
            .size
            .ok_or_else(|| Error::Empty("fingerprint of an empty image stream".into()))?;
        let n = self.count as f64;
        Ok(SpectralFingerprint {
            size,
            count: self.count,
            magnitude: self.sum.into_iter().map(|v| v / n).collect(),
        })
    }
}

/// Averages normalized spectra over a stream of images.
pub fn fingerprint<'a, I>(images: I, config: &FingerprintConfig) -> Result<SpectralFingerprint>
where
    I: IntoIterator<Item = &'a RasterImage>,
{
    let mut acc = FingerprintAccumulator::new(*config);
    for img in images {
        acc.add(img)?;
    }
    acc.finish()
}

/// Parallel variant of [`fingerprint`] over a slice.
pub fn fingerprint_par(images: &[RasterImage], config: &FingerprintConfig) -> Result<SpectralFingerprint> {
    use rayon::prelude::*;
    if images.is_empty() {
        return Err(Error::Empty("fingerprint of an empty image stream".into()));
    }
    images
        .par_iter()
        .map(|img| {
            let mut acc = FingerprintAccumulator::new(*config);
            acc.add(img)?;
            Ok(acc)
        })
        .try_reduce(
            || FingerprintAccumulator::new(*config),
            |a, b| a.merge(b),
        )?
        .finish()
}

/// Mean squared per-bin difference, scaled by 1000.
pub fn spectral_mse(a: &SpectralFingerprint, b: &SpectralFingerprint) -> Result<f64> {
    if a.size != b.size || a.magnitude.len() != b.magnitude.len() {
        return Err(Error::dims(format!(
            "fingerprint sizes {:?} and {:?} differ",
            a.size, b.size
        )));
    }
    if a.magnitude.is_empty() {
        return Err(Error::Empty("empty fingerprints".into()));
    }
    let mse = a
        .magnitude
        .iter()
        .zip(&b.magnitude)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.magnitude.len() as f64;
    Ok(mse * 1000.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn native() -> FingerprintConfig {
        FingerprintConfig { resize_to: None }
    }

    fn noise_image(seed: u64, n: usize) -> RasterImage {
        let mut s = seed;
        let data = (0..n * n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect();
        RasterImage::new(n, n, 1, data).unwrap()
    }

    #[test]
    fn empty_stream_is_an_error() {
        assert!(matches!(fingerprint([], &native()), Err(Error::Empty(_))));
    }

    #[test]
    fn identical_images_give_their_spectrum() {
        let img = noise_image(1, 16);
        let fp = fingerprint([&img, &img, &img], &native()).unwrap();
        let single = image_spectrum(&img, &native()).unwrap();
        assert_eq!(fp.count, 3);
        for (a, b) in fp.magnitude.iter().zip(&single.data) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((fp.magnitude.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_images_give_zero_fingerprint() {
        let img = RasterImage::filled(12, 12, 3, 0.7).unwrap();
        let fp = fingerprint([&img, &img], &native()).unwrap();
        assert_eq!(fp.size, (11, 11));
        assert!(fp.magnitude.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn resize_sets_size() {
        let img = noise_image(2, 20);
        let fp = fingerprint([&img], &FingerprintConfig { resize_to: Some(32) }).unwrap();
        assert_eq!(fp.size, (31, 31));
    }

    #[test]
    fn mismatched_native_sizes_rejected() {
        let (a, b) = (noise_image(1, 8), noise_image(2, 9));
        assert!(fingerprint([&a, &b], &native()).is_err());
    }

    #[test]
    fn mse_cases() {
        let a = SpectralFingerprint { size: (2, 1), count: 1, magnitude: vec![0.0, 1.0] };
        let b = SpectralFingerprint { size: (2, 1), count: 1, magnitude: vec![0.0, 0.0] };
        assert_eq!(spectral_mse(&a, &b).unwrap(), 500.0);
        assert_eq!(spectral_mse(&a, &a).unwrap(), 0.0);
        let c = SpectralFingerprint { size: (1, 1), count: 1, magnitude: vec![0.0] };
        assert!(spectral_mse(&a, &c).is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let imgs: Vec<_> = (0..6).map(|s| noise_image(s, 16)).collect();
        let seq = fingerprint(&imgs, &native()).unwrap();
        let par = fingerprint_par(&imgs, &native()).unwrap();
        assert_eq!(seq.count, par.count);
        for (a, b) in seq.magnitude.iter().zip(&par.magnitude) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn merge_is_count_weighted() {
        let imgs: Vec<_> = (0..5).map(|s| noise_image(s + 10, 8)).collect();
        let all = fingerprint(&imgs, &native()).unwrap();
        let a = fingerprint(&imgs[..2], &native()).unwrap();
        let b = fingerprint(&imgs[2..], &native()).unwrap();
        let m = a.merge(&b).unwrap();
        assert_eq!(m.count, 5);
        for (x, y) in m.magnitude.iter().zip(&all.magnitude) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn heatmap_in_range() {
        let img = noise_image(3, 16);
        let fp = fingerprint([&img], &native()).unwrap();
        let hm = fp.heatmap();
        assert_eq!((hm.width(), hm.height()), (15, 15));
    }
}
