//! Simulated encoder/decoder bottleneck `T = D ∘ E`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{resize_bilinear, Plane, RasterImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BottleneckMode {
    /// Box-mean downsample, bilinear upsample.
    BoxBilinear,
    /// Orthogonal projection onto the Haar approximation space at the
    /// latent scale: box-mean downsample, then block replication.
    IdealLowpass,
}

impl fmt::Display for BottleneckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BottleneckMode::BoxBilinear => "box",
            BottleneckMode::IdealLowpass => "ideal",
        })
    }
}

impl FromStr for BottleneckMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "box" | "box_bilinear" => Ok(BottleneckMode::BoxBilinear),
            "ideal" | "ideal_lowpass" => Ok(BottleneckMode::IdealLowpass),
            other => Err(Error::param(format!("unknown bottleneck mode `{other}` (expected box or ideal)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BottleneckSim {
    factor: usize,
    mode: BottleneckMode,
}

pub const SUPPORTED_FACTORS: [usize; 4] = [2, 4, 8, 16];

impl BottleneckSim {
    pub fn new(factor: usize, mode: BottleneckMode) -> Result<Self> {
        if !SUPPORTED_FACTORS.contains(&factor) {
            return Err(Error::param(format!(
                "bottleneck factor must be one of {SUPPORTED_FACTORS:?}, got {factor}"
            )));
        }
        Ok(BottleneckSim { factor, mode })
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn mode(&self) -> BottleneckMode {
        self.mode
    }

    /// `log2(r)`: the number of dyadic scales removed by the bottleneck.
    pub fn cutoff_level(&self) -> usize {
        self.factor.trailing_zeros() as usize
    }

    fn check_dims(&self, w: usize, h: usize) -> Result<()> {
        if w == 0 || h == 0 || w % self.factor != 0 || h % self.factor != 0 {
            return Err(Error::dims(format!(
                "{w}x{h} image is not divisible by bottleneck factor {}",
                self.factor
            )));
        }
        Ok(())
    }

    /// Box-mean downsampling to the latent grid.
    pub fn encode(&self, p: &Plane) -> Result<Plane> {
        self.check_dims(p.width, p.height)?;
        let r = self.factor;
        let norm = 1.0 / (r * r) as f64;
        Ok(Plane::from_fn(p.width / r, p.height / r, |lx, ly| {
            let mut s = 0.0;
            for y in ly * r..(ly + 1) * r {
                for x in lx * r..(lx + 1) * r {
                    s += p.get(x, y);
                }
            }
            s * norm
        }))
    }

    pub fn decode(&self, latent: &Plane) -> Plane {
        let r = self.factor;
        let (w, h) = (latent.width * r, latent.height * r);
        match self.mode {
            BottleneckMode::BoxBilinear => resize_bilinear(latent, w, h),
            BottleneckMode::IdealLowpass => Plane::from_fn(w, h, |x, y| latent.get(x / r, y / r)),
        }
    }

    pub fn reconstruct_plane(&self, p: &Plane) -> Result<Plane> {
        Ok(self.decode(&self.encode(p)?))
    }
}

/// Applies the simulated bottleneck to every channel; output is clamped to `[0,1]`.
pub fn bottleneck_reconstruct(img: &RasterImage, sim: &BottleneckSim) -> Result<RasterImage> {
    let planes = img
        .planes()
        .iter()
        .map(|p| sim.reconstruct_plane(p))
        .collect::<Result<Vec<_>>>()?;
    RasterImage::from_planes_clamped(&planes)
}
