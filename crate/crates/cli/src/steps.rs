//! Pipeline step grammar: `name[:arg[:arg]]` or `name(arg, arg)`.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use inpx_core::corrupt::{
    gaussian_blur, jpeg_compress, light_spot_with, LightSpotParams, SpotCenters, DEFAULT_BLUR_SIGMA,
    DEFAULT_JPEG_QUALITY, DEFAULT_SPOT_GAIN, DEFAULT_SPOT_RADIUS,
};
use inpx_core::imgcore::{exchange, soft_exchange};
use inpx_core::{BinaryMask, RasterImage};

pub const DEFAULT_BAND_WIDTH: usize = 2;
pub const DEFAULT_KERNEL: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Exchange,
    SoftExchange { band_width: usize, kernel: usize },
    Blur { sigma: f64 },
    Light { radius: f64, gain: f64 },
    Jpeg { quality: u8 },
}

impl Step {
    pub fn needs_original(&self) -> bool {
        matches!(self, Step::Exchange | Step::SoftExchange { .. })
    }

    pub fn apply(
        &self,
        work: &RasterImage,
        original: Option<&(RasterImage, BinaryMask)>,
        centers: &mut SpotCenters,
        spots: &mut Vec<LightSpotParams>,
    ) -> Result<RasterImage> {
        let inputs = || original.ok_or_else(|| anyhow!("step `{self}` needs the original image and mask"));
        Ok(match *self {
            Step::Exchange => {
                let (o, m) = inputs()?;
                exchange(o, work, m)?
            }
            Step::SoftExchange { band_width, kernel } => {
                let (o, m) = inputs()?;
                soft_exchange(o, work, m, band_width, kernel)?
            }
            Step::Blur { sigma } => gaussian_blur(work, sigma)?,
            Step::Light { radius, gain } => {
                let (img, params) = light_spot_with(work, radius, gain, centers)?;
                spots.push(params);
                img
            }
            Step::Jpeg { quality } => jpeg_compress(work, quality)?,
        })
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Exchange => write!(f, "exchange"),
            Step::SoftExchange { band_width, kernel } => write!(f, "soft-exchange:{band_width}:{kernel}"),
            Step::Blur { sigma } => write!(f, "blur:{sigma}"),
            Step::Light { radius, gain } => write!(f, "light:{radius}:{gain}"),
            Step::Jpeg { quality } => write!(f, "jpeg:{quality}"),
        }
    }
}

fn split(s: &str) -> Result<(&str, Vec<&str>)> {
    let s = s.trim();
    if let Some(open) = s.find('(') {
        let inner = s[open + 1..]
            .strip_suffix(')')
            .with_context(|| format!("unbalanced parentheses in step `{s}`"))?;
        let args = inner.split(',').map(str::trim).filter(|a| !a.is_empty()).collect();
        return Ok((s[..open].trim(), args));
    }
    let mut parts = s.split(':').map(str::trim);
    let name = parts.next().unwrap_or("");
    Ok((name, parts.collect()))
}

fn arg<T: FromStr>(args: &[&str], i: usize, default: T, what: &str) -> Result<T> {
    match args.get(i) {
        None => Ok(default),
        Some(a) => a.parse().map_err(|_| anyhow!("invalid {what} `{a}`")),
    }
}

impl FromStr for Step {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = split(s)?;
        let (step, max_args) = match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "exchange" => (Step::Exchange, 0),
            "soft-exchange" => (
                Step::SoftExchange {
                    band_width: arg(&args, 0, DEFAULT_BAND_WIDTH, "band width")?,
                    kernel: arg(&args, 1, DEFAULT_KERNEL, "kernel size")?,
                },
                2,
            ),
            "blur" => (
                Step::Blur {
                    sigma: arg(&args, 0, DEFAULT_BLUR_SIGMA, "blur sigma")?,
                },
                1,
            ),
            "light" => (
                Step::Light {
                    radius: arg(&args, 0, DEFAULT_SPOT_RADIUS, "spot radius")?,
                    gain: arg(&args, 1, DEFAULT_SPOT_GAIN, "spot gain")?,
                },
                2,
            ),
            "jpeg" => (
                Step::Jpeg {
                    quality: arg(&args, 0, DEFAULT_JPEG_QUALITY, "JPEG quality")?,
                },
                1,
            ),
            "" => bail!("empty step name"),
            other => bail!("unknown step `{other}` (expected exchange, soft-exchange, blur, light or jpeg)"),
        };
        if args.len() > max_args {
            bail!("step `{name}` takes at most {max_args} argument(s), got {}", args.len());
        }
        Ok(step)
    }
}

/// Parses a comma-separated chain; whitespace-only input is the empty chain.
pub fn parse_steps(s: &str) -> Result<Vec<Step>> {
    let mut steps = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                steps.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    steps.push(&s[start..]);
    steps
        .into_iter()
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect()
}
