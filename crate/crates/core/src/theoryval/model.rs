//! Synthetic images `x = clamp(s + n)`: a smooth semantic base plus
//! white Gaussian noise.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{BinaryMask, Plane, RasterImage};

pub const DEFAULT_IMAGE_SIZE: usize = 128;
pub const DEFAULT_SIGMA_N: f64 = 0.05;
/// Log-scale spread of the per-image noise level.
pub const DEFAULT_SIGMA_SPREAD: f64 = 0.3;
pub const DEFAULT_SEED: u64 = 7;

/// Independent random streams drawn from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Real = 0,
    /// Replacement content for the inpainted region.
    Foreground = 1,
    Mask = 2,
    Calibration = 3,
    Shuffle = 4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisyImageModel {
    /// Square image side.
    pub size: usize,
    /// Nominal noise standard deviation.
    pub sigma_n: f64,
    /// Per-image noise level is `sigma_n * exp(sigma_spread * z)`, `z ~ N(0,1)`.
    pub sigma_spread: f64,
    pub seed: u64,
}

impl Default for NoisyImageModel {
    fn default() -> Self {
        NoisyImageModel {
            size: DEFAULT_IMAGE_SIZE,
            sigma_n: DEFAULT_SIGMA_N,
            sigma_spread: DEFAULT_SIGMA_SPREAD,
            seed: DEFAULT_SEED,
        }
    }
}

impl NoisyImageModel {
    pub fn new(size: usize, sigma_n: f64, seed: u64) -> Result<Self> {
        let m = NoisyImageModel {
            size,
            sigma_n,
            seed,
            ..Default::default()
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.size < 4 {
            return Err(Error::param(format!("image size {} is too small", self.size)));
        }
        if !(self.sigma_n >= 0.0 && self.sigma_n.is_finite()) {
            return Err(Error::param(format!("sigma_n must be >= 0, got {}", self.sigma_n)));
        }
        if !(self.sigma_spread >= 0.0 && self.sigma_spread.is_finite()) {
            return Err(Error::param(format!("sigma_spread must be >= 0, got {}", self.sigma_spread)));
        }
        Ok(())
    }

    pub fn rng(&self, stream: Stream, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((stream as u64) << 48) | index);
        rng
    }

    /// Smooth base: mean 0.5, a linear gradient and 3 to 5 low-frequency cosines.
    pub fn semantic(&self, rng: &mut impl Rng) -> Plane {
        let n = self.size as f64;
        let gx = rng.random_range(-0.05..0.05);
        let gy = rng.random_range(-0.05..0.05);
        let k = rng.random_range(3..=5);
        let waves: Vec<(f64, f64, f64, f64)> = (0..k)
            .map(|_| {
                let fx = rng.random_range(0..=3) as f64;
                let fy = if fx == 0.0 { rng.random_range(1..=3) } else { rng.random_range(0..=3) } as f64;
                (fx, fy, rng.random_range(0.02..0.06), rng.random_range(0.0..2.0 * PI))
            })
            .collect();
        Plane::from_fn(self.size, self.size, |x, y| {
            let (u, v) = ((x as f64 + 0.5) / n, (y as f64 + 0.5) / n);
            let mut s = 0.5 + gx * (2.0 * u - 1.0) + gy * (2.0 * v - 1.0);
            for &(fx, fy, a, ph) in &waves {
                s += a * (2.0 * PI * (fx * u + fy * v) + ph).cos();
            }
            s
        })
    }

    /// Draws image `index` of `stream`.
    pub fn sample(&self, stream: Stream, index: u64) -> RasterImage {
        let mut rng = self.rng(stream, index);
        let mut p = self.semantic(&mut rng);
        let z: f64 = rng.sample(StandardNormal);
        let sigma = self.sigma_n * (self.sigma_spread * z).exp();
        if sigma > 0.0 {
            for v in p.data.iter_mut() {
                let e: f64 = rng.sample(StandardNormal);
                *v += sigma * e;
            }
        }
        RasterImage::from_planes_clamped(&[p]).expect("plane is non-empty")
    }
}

/// Placement of a rectangular edit region, reusable across mask ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectShape {
    /// Center in `[0,1]²`.
    pub center: (f64, f64),
    /// Width over height.
    pub aspect: f64,
}

impl RectShape {
    pub fn draw(rng: &mut impl Rng) -> Self {
        RectShape {
            center: (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)),
            aspect: rng.random_range(0.5f64..2.0),
        }
    }

    /// Axis-aligned rectangle of area close to `ratio * side²`, shifted to
    /// stay inside the image. Masks for growing ratios are nested.
    pub fn mask(&self, side: usize, ratio: f64) -> BinaryMask {
        let area = ratio.clamp(0.0, 1.0) * (side * side) as f64;
        let s = side as f64;
        let mut w = (area * self.aspect).sqrt().min(s);
        let mut h = (area / w.max(1e-12)).min(s);
        if h >= s {
            w = (area / s).min(s);
            h = s;
        }
        let (w, h) = (w.round() as usize, h.round() as usize);
        let x0 = ((self.center.0 * s - w as f64 / 2.0).round().max(0.0) as usize).min(side - w);
        let y0 = ((self.center.1 * s - h as f64 / 2.0).round().max(0.0) as usize).min(side - h);
        BinaryMask::from_fn(side, side, |x, y| x >= x0 && x < x0 + w && y >= y0 && y < y0 + h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_index() {
        let m = NoisyImageModel::default();
        assert_eq!(m.sample(Stream::Real, 3), m.sample(Stream::Real, 3));
        assert_ne!(m.sample(Stream::Real, 3), m.sample(Stream::Real, 4));
        assert_ne!(m.sample(Stream::Real, 3), m.sample(Stream::Foreground, 3));
    }

    #[test]
    fn noiseless_is_smooth_and_in_range() {
        let m = NoisyImageModel { sigma_n: 0.0, ..Default::default() };
        let img = m.sample(Stream::Real, 0);
        let p = img.plane(0);
        assert!(p.data.iter().all(|&v| (0.05..=0.95).contains(&v)));
        for y in 0..p.height {
            for x in 1..p.width {
                assert!((p.get(x, y) - p.get(x - 1, y)).abs() < 0.02);
            }
        }
    }

    #[test]
    fn noise_level_matches() {
        let m = NoisyImageModel { sigma_spread: 0.0, ..Default::default() };
        let mut rng = m.rng(Stream::Real, 0);
        let s = m.semantic(&mut rng);
        let x = m.sample(Stream::Real, 0).plane(0);
        let var = s.data.iter().zip(&x.data).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / s.len() as f64;
        assert!((var.sqrt() - 0.05).abs() < 0.003, "{}", var.sqrt());
    }

    #[test]
    fn negative_sigma_rejected() {
        assert!(NoisyImageModel::new(64, -0.1, 0).is_err());
    }

    #[test]
    fn rect_masks_hit_ratio_and_nest() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let shape = RectShape::draw(&mut rng);
            let small = shape.mask(128, 0.1);
            let large = shape.mask(128, 0.3);
            assert!((small.ratio() - 0.1).abs() < 0.01, "{}", small.ratio());
            assert!((large.ratio() - 0.3).abs() < 0.015, "{}", large.ratio());
        }
    }
}
