//! Comparison corruptions: Gaussian blur, localized light spot, JPEG.

pub mod jpeg;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::filter::{convolve_separable, gaussian_kernel, radius_for_sigma};
use crate::imgcore::RasterImage;

pub use jpeg::{
    encode_jpeg, encode_jpeg_with, jpeg_compress, psnr, quant_tables, ChromaSubsampling, FULL_CHROMA_QUALITY,
};

/// Default blur strength used by the robustness comparison.
pub const DEFAULT_BLUR_SIGMA: f64 = 3.0;
/// Default light-spot radius in pixels.
pub const DEFAULT_SPOT_RADIUS: f64 = 120.0;
/// Default light-spot peak gain.
pub const DEFAULT_SPOT_GAIN: f64 = 1.5;
/// Default JPEG quality.
pub const DEFAULT_JPEG_QUALITY: u8 = 80;

/// Separable Gaussian blur with the kernel truncated at `±ceil(3σ)` and
/// reflected borders. Output is clamped and re-quantized to 8 bits.
pub fn gaussian_blur(img: &RasterImage, sigma: f64) -> Result<RasterImage> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param(format!("blur sigma must be positive, got {sigma}")));
    }
    let kernel = gaussian_kernel(radius_for_sigma(sigma), sigma);
    let planes: Vec<_> = img
        .planes()
        .iter()
        .map(|p| convolve_separable(p, &kernel))
        .collect();
    Ok(RasterImage::from_planes_clamped(&planes)?.quantized())
}

/// Parameters of a multiplicative Gaussian illumination spot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightSpotParams {
    /// Spot center `(x, y)` in pixel coordinates.
    pub center: (f64, f64),
    pub radius: f64,
    /// Peak multiplier at the center.
    pub gain: f64,
}

impl LightSpotParams {
    pub fn new(center: (f64, f64), radius: f64, gain: f64) -> Result<Self> {
        check_spot_shape(radius, gain)?;
        Ok(LightSpotParams {
            center,
            radius,
            gain,
        })
    }

    /// Multiplier applied at distance `d` from the center.
    #[inline]
    pub fn gain_at(&self, d: f64) -> f64 {
        1.0 + (self.gain - 1.0) * (-(d * d) / (2.0 * self.radius * self.radius)).exp()
    }
}

fn check_spot_shape(radius: f64, gain: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::param(format!("spot radius must be positive, got {radius}")));
    }
    if !(gain >= 1.0 && gain.is_finite()) {
        return Err(Error::param(format!("spot gain must be >= 1, got {gain}")));
    }
    Ok(())
}

/// Seed for reproducible corruption placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

/// Multiplies every pixel by `1 + (A-1) exp(-d²/2r²)`, clamps to `[0,1]`
/// and re-quantizes to 8 bits.
pub fn light_spot(img: &RasterImage, params: &LightSpotParams) -> Result<RasterImage> {
    check_spot_shape(params.radius, params.gain)?;
    let (cx, cy) = params.center;
    let (w, h) = (img.width() as f64, img.height() as f64);
    if !(cx >= 0.0 && cx <= w - 1.0 && cy >= 0.0 && cy <= h - 1.0) {
        return Err(Error::param(format!(
            "spot center ({cx}, {cy}) outside {}x{} image",
            img.width(),
            img.height()
        )));
    }
    let c = img.channels();
    let mut data = img.data().to_vec();
    for y in 0..img.height() {
        for x in 0..img.width() {
            let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
            let g = params.gain_at(d);
            let i = (y * img.width() + x) * c;
            for v in &mut data[i..i + c] {
                *v = (*v * g).clamp(0.0, 1.0);
            }
        }
    }
    Ok(RasterImage::new(img.width(), img.height(), c, data)?.quantized())
}

/// Deterministic stream of spot centers; draw `i` depends only on the seed and `i`.
#[derive(Debug, Clone)]
pub struct SpotCenters {
    rng: ChaCha8Rng,
}

impl SpotCenters {
    pub fn new(seed: RngSeed) -> Self {
        SpotCenters {
            rng: ChaCha8Rng::seed_from_u64(seed.0),
        }
    }

    /// Independent stream for item `index` of a batch.
    pub fn for_item(seed: RngSeed, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
        rng.set_stream(index);
        SpotCenters { rng }
    }

    /// Draws a pixel center uniformly over a `width`×`height` grid.
    pub fn draw(&mut self, width: usize, height: usize) -> (f64, f64) {
        let x = self.rng.random_range(0..width);
        let y = self.rng.random_range(0..height);
        (x as f64, y as f64)
    }
}

/// Light spot at a seeded random pixel center; returns the drawn parameters.
pub fn light_spot_random(
    img: &RasterImage,
    radius: f64,
    gain: f64,
    seed: RngSeed,
) -> Result<(RasterImage, LightSpotParams)> {
    light_spot_with(img, radius, gain, &mut SpotCenters::new(seed))
}

/// Light spot whose center is the next draw from `centers`.
pub fn light_spot_with(
    img: &RasterImage,
    radius: f64,
    gain: f64,
    centers: &mut SpotCenters,
) -> Result<(RasterImage, LightSpotParams)> {
    let params = LightSpotParams::new(centers.draw(img.width(), img.height()), radius, gain)?;
    Ok((light_spot(img, &params)?, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(w: usize, h: usize, v: f64) -> RasterImage {
        RasterImage::filled(w, h, 1, v).unwrap()
    }

    #[test]
    fn blur_rejects_bad_sigma() {
        let img = gray(4, 4, 0.5);
        assert!(gaussian_blur(&img, 0.0).is_err());
        assert!(gaussian_blur(&img, -1.0).is_err());
        assert!(gaussian_blur(&img, f64::NAN).is_err());
    }

    #[test]
    fn blur_keeps_constants() {
        let img = RasterImage::filled(20, 13, 3, 0.6).unwrap();
        let out = gaussian_blur(&img, 3.0).unwrap();
        assert!(out.data().iter().all(|&v| (v - 0.6).abs() < 1e-12));
    }

    #[test]
    fn spot_peak_gain_at_center() {
        let img = gray(9, 9, 0.4);
        let p = LightSpotParams::new((4.0, 4.0), 120.0, 1.5).unwrap();
        assert_eq!(p.gain_at(0.0), 1.5);
        let out = light_spot(&img, &p).unwrap();
        assert!((out.get(4, 4, 0) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn unit_gain_is_identity() {
        let img = RasterImage::from_u8(3, 2, 3, &(10..28).map(|v| v * 5).collect::<Vec<u8>>()).unwrap();
        let p = LightSpotParams::new((1.0, 1.0), 2.0, 1.0).unwrap();
        assert_eq!(light_spot(&img, &p).unwrap(), img);
    }

    #[test]
    fn half_gain_radius() {
        let r = 5.0 / (2.0 * 2f64.ln()).sqrt();
        let p = LightSpotParams::new((0.0, 0.0), r, 1.5).unwrap();
        let img = gray(8, 1, 0.5);
        let out = light_spot(&img, &p).unwrap();
        assert!((p.gain_at(5.0) - 1.25).abs() < 1e-12);
        assert!((out.get(5, 0, 0) - 0.5 * 1.25).abs() <= 0.5 / 255.0);
    }

    #[test]
    fn spot_clamps_and_validates() {
        let img = gray(5, 5, 0.9);
        let out = light_spot(&img, &LightSpotParams::new((2.0, 2.0), 3.0, 1.5).unwrap()).unwrap();
        assert_eq!(out.get(2, 2, 0), 1.0);
        assert!(light_spot(&img, &LightSpotParams { center: (5.0, 0.0), radius: 3.0, gain: 1.5 }).is_err());
        assert!(light_spot(&img, &LightSpotParams { center: (-0.5, 0.0), radius: 3.0, gain: 1.5 }).is_err());
        assert!(LightSpotParams::new((0.0, 0.0), 0.0, 1.5).is_err());
        assert!(LightSpotParams::new((0.0, 0.0), 1.0, 0.9).is_err());
    }

    #[test]
    fn gain_decreases_radially() {
        let p = LightSpotParams::new((0.0, 0.0), 10.0, 2.0).unwrap();
        let mut prev = f64::INFINITY;
        for d in 0..60 {
            let g = p.gain_at(d as f64);
            assert!(g <= prev);
            prev = g;
        }
    }

    #[test]
    fn seeded_centers() {
        let img = gray(512, 512, 0.3);
        let (a, pa) = light_spot_random(&img, 120.0, 1.5, RngSeed(3)).unwrap();
        let (b, pb) = light_spot_random(&img, 120.0, 1.5, RngSeed(3)).unwrap();
        assert_eq!(pa, pb);
        assert_eq!(a, b);
        let (_, pc) = light_spot_random(&img, 120.0, 1.5, RngSeed(4)).unwrap();
        assert_ne!(pa.center, pc.center);
    }

    #[test]
    fn stream_gives_fresh_draws_per_image() {
        let mut s = SpotCenters::new(RngSeed(11));
        let draws: Vec<_> = (0..8).map(|_| s.draw(512, 512)).collect();
        let mut uniq = draws.clone();
        uniq.sort_by(|a, b| a.partial_cmp(b).unwrap());
        uniq.dedup();
        assert_eq!(uniq.len(), draws.len());
        assert_eq!(SpotCenters::for_item(RngSeed(11), 5).draw(512, 512), SpotCenters::for_item(RngSeed(11), 5).draw(512, 512));
        assert_ne!(SpotCenters::for_item(RngSeed(11), 5).draw(512, 512), SpotCenters::for_item(RngSeed(11), 6).draw(512, 512));
    }
}
