//! Pearson/Spearman correlation at image and pixel level between the
//! reconstruction-error, inpainting-difference and high-frequency signals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{BinaryMask, Plane, RasterImage};
use crate::spectra::high_pass;

/// Sample Pearson correlation. Errors if either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::dims(format!(
            "correlation inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Undefined("correlation needs at least 2 samples".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("correlation of a constant signal".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && x[order[j]] == x[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share ranks i+1..=j
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

/// Spearman's rank correlation: Pearson of tie-averaged ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::dims(format!(
            "correlation inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Per-image mean signals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageSignals {
    /// Mean `|x - T(x)|`.
    pub vae_loss: f64,
    /// Mean `|x̃ - x|`.
    pub inpaint_diff: f64,
    /// Mean cross-difference magnitude of `x`.
    pub high_freq: f64,
}

/// Aligned per-pixel signal maps for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelSignals {
    pub vae_loss: Plane,
    pub inpaint_diff: Plane,
    pub high_freq: Plane,
    /// Edit mask, cropped to the map size, for background-only analysis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<BinaryMask>,
}

fn abs_luma_diff(a: &RasterImage, b: &RasterImage, w: usize, h: usize) -> Result<Plane> {
    if !a.same_shape(b) {
        return Err(Error::dims("signal images differ in shape"));
    }
    let (la, lb) = (
        crate::spectra::to_luma(a).plane(0),
        crate::spectra::to_luma(b).plane(0),
    );
    Ok(Plane::from_fn(w, h, |x, y| (la.get(x, y) - lb.get(x, y)).abs()))
}

impl PixelSignals {
    /// Builds aligned maps from the original, the inpainted result and the
    /// pure reconstruction of the original. All maps are cropped to the
    /// `(W-1)×(H-1)` grid of the cross-difference response.
    pub fn from_images(
        original: &RasterImage,
        inpainted: &RasterImage,
        reconstructed: &RasterImage,
        mask: Option<&BinaryMask>,
    ) -> Result<Self> {
        let high_freq = high_pass(original)?;
        let (w, h) = (high_freq.width, high_freq.height);
        let mask = match mask {
            Some(m) => {
                m.check_matches(original)?;
                Some(BinaryMask::from_fn(w, h, |x, y| m.get(x, y)))
            }
            None => None,
        };
        Ok(PixelSignals {
            vae_loss: abs_luma_diff(original, reconstructed, w, h)?,
            inpaint_diff: abs_luma_diff(inpainted, original, w, h)?,
            high_freq,
            mask,
        })
    }

    pub fn means(&self) -> ImageSignals {
        ImageSignals {
            vae_loss: self.vae_loss.mean(),
            inpaint_diff: self.inpaint_diff.mean(),
            high_freq: self.high_freq.mean(),
        }
    }

    fn check(&self) -> Result<()> {
        let dims = (self.vae_loss.width, self.vae_loss.height);
        if (self.inpaint_diff.width, self.inpaint_diff.height) != dims
            || (self.high_freq.width, self.high_freq.height) != dims
        {
            return Err(Error::dims("pixel signal maps are not aligned"));
        }
        if let Some(m) = &self.mask {
            if (m.width(), m.height()) != dims {
                return Err(Error::dims("mask does not match the signal maps"));
            }
        }
        Ok(())
    }

    fn select(&self, region: Region) -> Result<[Vec<f64>; 3]> {
        self.check()?;
        let keep: Vec<bool> = match (region, &self.mask) {
            (Region::Full, _) => vec![true; self.vae_loss.len()],
            (Region::Background, Some(m)) => m.bits().iter().map(|b| !b).collect(),
            (Region::Background, None) => {
                return Err(Error::param("background region requires a mask"))
            }
        };
        let pick = |p: &Plane| -> Vec<f64> {
            p.data
                .iter()
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|(&v, _)| v)
                .collect()
        };
        Ok([pick(&self.vae_loss), pick(&self.inpaint_diff), pick(&self.high_freq)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    #[default]
    Full,
    /// Only pixels outside the edit mask.
    Background,
}

/// The three signal pairings, in report order.
pub const SIGNAL_PAIRS: [(&str, usize, usize); 3] = [
    ("vae_inpaint", 0, 1),
    ("vae_highfreq", 0, 2),
    ("inpaint_highfreq", 1, 2),
];

/// Correlation of one signal pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCorrelation {
    pub pair: String,
    pub pearson: f64,
    pub spearman: f64,
    /// Standard deviation across images (pixel level only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pearson_std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spearman_std: Option<f64>,
    /// Images contributing to this pair.
    pub n: usize,
    /// Images skipped because a signal was constant.
    pub skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Image,
    Pixel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub level: Level,
    pub region: Region,
    pub n: usize,
    pub pairs: Vec<PairCorrelation>,
}

impl CorrelationReport {
    pub fn pair(&self, name: &str) -> Option<&PairCorrelation> {
        self.pairs.iter().find(|p| p.pair == name)
    }
}

/// Pearson and Spearman over per-image means for all three pairs.
pub fn image_level_correlations(signals: &[ImageSignals]) -> Result<CorrelationReport> {
    if signals.len() < 3 {
        return Err(Error::Undefined(format!(
            "image-level correlation needs at least 3 images, got {}",
            signals.len()
        )));
    }
    let cols = [
        signals.iter().map(|s| s.vae_loss).collect::<Vec<_>>(),
        signals.iter().map(|s| s.inpaint_diff).collect(),
        signals.iter().map(|s| s.high_freq).collect(),
    ];
    let pairs = SIGNAL_PAIRS
        .iter()
        .map(|&(name, a, b)| {
            Ok(PairCorrelation {
                pair: name.to_string(),
                pearson: pearson(&cols[a], &cols[b])?,
                spearman: spearman(&cols[a], &cols[b])?,
                pearson_std: None,
                spearman_std: None,
                n: signals.len(),
                skipped: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationReport {
        level: Level::Image,
        region: Region::Full,
        n: signals.len(),
        pairs,
    })
}

/// Running mean/variance fold over per-image coefficients.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    pub fn merge(self, o: Moments) -> Moments {
        Moments {
            n: self.n + o.n,
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
        }
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Population standard deviation.
    pub fn std(&self) -> f64 {
        let m = self.mean();
        (self.sum_sq / self.n as f64 - m * m).max(0.0).sqrt()
    }
}

/// Minimum pixels each image must contribute.
pub const MIN_PIXELS: usize = 16;

/// Per-image correlations over pixels, summarized as mean ± std across images.
/// Images whose signal is constant for a pair are skipped for that pair and counted.
pub fn pixel_level_correlations(images: &[PixelSignals], region: Region) -> Result<CorrelationReport> {
    if images.is_empty() {
        return Err(Error::Empty("no images for pixel-level correlation".into()));
    }
    let mut pearson_m = [Moments::default(); 3];
    let mut spearman_m = [Moments::default(); 3];
    let mut skipped = [0usize; 3];
    for (i, img) in images.iter().enumerate() {
        let cols = img.select(region)?;
        if cols[0].len() < MIN_PIXELS {
            return Err(Error::Undefined(format!(
                "image {i} contributes {} pixels, need at least {MIN_PIXELS}",
                cols[0].len()
            )));
        }
        for (k, &(_, a, b)) in SIGNAL_PAIRS.iter().enumerate() {
            match (pearson(&cols[a], &cols[b]), spearman(&cols[a], &cols[b])) {
                (Ok(r), Ok(rho)) => {
                    pearson_m[k].push(r);
                    spearman_m[k].push(rho);
                }
                (Err(Error::Undefined(_)), _) | (_, Err(Error::Undefined(_))) => skipped[k] += 1,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        }
    }
    let pairs = SIGNAL_PAIRS
        .iter()
        .enumerate()
        .map(|(k, &(name, _, _))| {
            let (pm, sm) = (pearson_m[k], spearman_m[k]);
            let defined = pm.n > 0;
            PairCorrelation {
                pair: name.to_string(),
                pearson: if defined { pm.mean() } else { f64::NAN },
                spearman: if defined { sm.mean() } else { f64::NAN },
                pearson_std: defined.then(|| pm.std()),
                spearman_std: defined.then(|| sm.std()),
                n: pm.n,
                skipped: skipped[k],
            }
        })
        .collect::<Vec<_>>();
    if pairs.iter().any(|p| p.n == 0) {
        return Err(Error::Undefined(
            "every image was degenerate for at least one signal pair".into(),
        ));
    }
    Ok(CorrelationReport {
        level: Level::Pixel,
        region,
        n: images.len(),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_anti_correlation() {
        let x = [1.0, 2.0, 5.0, 7.0];
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let y: Vec<f64> = x.iter().map(|v| -2.0 * v + 3.0).collect();
        assert!((pearson(&x, &y).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn small_hand_case() {
        // means 2.5, cov sum = 4, var sums = 5 and 5
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-15);
    }

    #[test]
    fn constant_is_undefined() {
        assert!(matches!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::Undefined(_))));
        assert!(matches!(spearman(&[1.0, 2.0], &[4.0, 4.0]), Err(Error::Undefined(_))));
        assert!(pearson(&[1.0], &[2.0]).is_err());
        assert!(matches!(pearson(&[1.0, 2.0], &[1.0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn tie_ranks() {
        assert_eq!(average_ranks(&[1.0, 1.0, 2.0]), vec![1.5, 1.5, 3.0]);
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0, 1.0]), vec![4.0, 1.5, 3.0, 1.5]);
    }

    #[test]
    fn spearman_monotone() {
        let x = [0.1, 0.5, 0.3, 2.0, -1.0];
        let y: Vec<f64> = x.iter().map(|v| v * v * v + 10.0).collect();
        assert!((spearman(&x, &y).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn image_level_needs_three() {
        let s = ImageSignals { vae_loss: 1.0, inpaint_diff: 2.0, high_freq: 3.0 };
        assert!(image_level_correlations(&[s, s]).is_err());
    }

    #[test]
    fn image_level_identical_pair() {
        let sigs: Vec<ImageSignals> = (0..6)
            .map(|i| ImageSignals {
                vae_loss: i as f64,
                inpaint_diff: ((i * 7) % 5) as f64,
                high_freq: i as f64,
            })
            .collect();
        let rep = image_level_correlations(&sigs).unwrap();
        let p = rep.pair("vae_highfreq").unwrap();
        assert!((p.pearson - 1.0).abs() < 1e-15 && (p.spearman - 1.0).abs() < 1e-15);
    }

    fn maps(seed: usize, n: usize) -> PixelSignals {
        let v = Plane::from_fn(n, n, |x, y| ((x * 7 + y * 3 + seed) % 11) as f64);
        PixelSignals {
            vae_loss: v.clone(),
            inpaint_diff: v.clone(),
            high_freq: v,
            mask: None,
        }
    }

    #[test]
    fn identical_maps_give_unit_mean_zero_std() {
        let rep = pixel_level_correlations(&[maps(0, 5), maps(3, 5)], Region::Full).unwrap();
        for p in &rep.pairs {
            assert!((p.pearson - 1.0).abs() < 1e-12);
            assert!(p.pearson_std.unwrap() < 1e-7);
            assert_eq!(p.n, 2);
        }
    }

    #[test]
    fn degenerate_images_are_skipped() {
        let mut flat = maps(0, 5);
        flat.inpaint_diff = Plane::from_fn(5, 5, |_, _| 0.0);
        let rep = pixel_level_correlations(&[maps(1, 5), flat], Region::Full).unwrap();
        assert_eq!(rep.pair("vae_inpaint").unwrap().skipped, 1);
        assert_eq!(rep.pair("vae_highfreq").unwrap().skipped, 0);
    }

    #[test]
    fn too_few_pixels() {
        assert!(pixel_level_correlations(&[maps(0, 3)], Region::Full).is_err());
    }

    #[test]
    fn background_requires_mask() {
        assert!(pixel_level_correlations(&[maps(0, 5)], Region::Background).is_err());
        let mut m = maps(0, 6);
        m.mask = Some(BinaryMask::from_fn(6, 6, |x, _| x < 1));
        let rep = pixel_level_correlations(&[m], Region::Background).unwrap();
        assert_eq!(rep.region, Region::Background);
    }

    #[test]
    fn signals_from_images_are_aligned() {
        let o = RasterImage::from_u8(6, 5, 3, &(0..90).map(|i| (i * 29 % 256) as u8).collect::<Vec<_>>()).unwrap();
        let g = RasterImage::filled(6, 5, 3, 0.5).unwrap();
        let s = PixelSignals::from_images(&o, &g, &o, Some(&BinaryMask::filled(6, 5, false))).unwrap();
        assert_eq!((s.vae_loss.width, s.vae_loss.height), (5, 4));
        assert!(s.vae_loss.data.iter().all(|&v| v == 0.0));
        assert!(s.means().inpaint_diff > 0.0);
    }

    #[test]
    fn report_round_trips_through_json() {
        let rep = pixel_level_correlations(&[maps(0, 5), maps(3, 5), maps(4, 6)], Region::Full).unwrap();
        let text = serde_json::to_string(&rep).unwrap();
        let back: CorrelationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
    }
}
