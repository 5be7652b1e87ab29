//! Desk-scale checks of the spectral claims against a simulated bottleneck
//! autoencoder and synthetic noisy images.

pub mod bottleneck;
pub mod detector;
pub mod model;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::evalharness::{
    classification_metrics, stratify_by_mask_ratio, DetectionRecord, Label, StratumReport, DEFAULT_THRESHOLD,
};
use crate::imgcore::{exchange, Plane, RasterImage};
use crate::spectra::{
    fingerprint, haar_energies, mean_psd, radial_psd, spectral_mse, FingerprintConfig, HIGH_BAND_CUTOFF,
};
use crate::stats::{image_level_correlations, pearson, pixel_level_correlations, CorrelationReport, PixelSignals, Region};

pub use bottleneck::{bottleneck_reconstruct, BottleneckMode, BottleneckSim, SUPPORTED_FACTORS};
pub use detector::{FrequencyOracle, ORACLE_BINS};
pub use model::{
    NoisyImageModel, RectShape, Stream, DEFAULT_IMAGE_SIZE, DEFAULT_SEED, DEFAULT_SIGMA_N, DEFAULT_SIGMA_SPREAD,
};

pub const DEFAULT_FACTOR: usize = 8;
pub const DEFAULT_MASK_RATIO: f64 = 0.1;
pub const DEFAULT_N: usize = 100;
pub const CONTRACTION_BINS: usize = 16;

/// Upper bound on the mean high-band ratio `S_T(x) / S_x`.
pub const CONTRACTION_RATIO_MAX: f64 = 0.5;
pub const GAP_MIN: f64 = 0.25;
pub const AUC_EX_MAX: f64 = 0.65;
pub const SPECTRAL_MSE_RATIO_MIN: f64 = 5.0;
pub const CORRELATION_MIN: f64 = 0.5;
pub const SHUFFLED_MAX: f64 = 0.3;
/// Mask-ratio edges for the stratified demo.
pub const STRATA_EDGES: [f64; 4] = [0.0, 0.1, 0.25, 0.5];
/// Slack for "≤" comparisons between accumulated powers.
pub const POWER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `"<="`, `">="`, `"<"`, `">"` or `"=="`.
    pub relation: String,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, relation: &str, bound: f64) -> Self {
        let passed = match relation {
            "<=" => value <= bound,
            ">=" => value >= bound,
            "<" => value < bound,
            ">" => value > bound,
            _ => value == bound,
        };
        Check {
            name: name.into(),
            value,
            relation: relation.to_string(),
            bound,
            passed,
        }
    }
}

/// Mean power of `x` and `T(x)` in one radial band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPower {
    pub bin: usize,
    pub freq_lo: f64,
    pub freq_hi: f64,
    pub power_x: f64,
    pub power_tx: f64,
    pub ratio: Option<f64>,
}

/// Haar detail energy of `x` and `T(x)` at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleRatio {
    /// 1 is the finest level.
    pub level: usize,
    /// Scales above the bottleneck cutoff; 0 is the coarsest level the latent grid still resolves.
    pub offset: isize,
    pub energy_x: f64,
    pub energy_tx: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub thresholds: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bands: Vec<BandPower>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scales: Vec<ScaleRatio>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strata: Vec<StratumReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub correlations: Vec<CorrelationReport>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl TheoremReport {
    fn new(check: &str, params: BTreeMap<String, Value>) -> Self {
        TheoremReport {
            check: check.to_string(),
            params,
            thresholds: BTreeMap::new(),
            bands: Vec::new(),
            scales: Vec::new(),
            strata: Vec::new(),
            correlations: Vec::new(),
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            passed: true,
        }
    }

    fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }
}

fn params(model: &NoisyImageModel, sim: &BottleneckSim, n: usize) -> BTreeMap<String, Value> {
    BTreeMap::from([
        ("r".to_string(), json!(sim.factor())),
        ("mode".to_string(), json!(sim.mode())),
        ("size".to_string(), json!(model.size)),
        ("sigma_n".to_string(), json!(model.sigma_n)),
        ("sigma_spread".to_string(), json!(model.sigma_spread)),
        ("seed".to_string(), json!(model.seed)),
        ("n".to_string(), json!(n)),
    ])
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

fn real_pairs(model: &NoisyImageModel, sim: &BottleneckSim, n: usize) -> Result<Vec<(Plane, Plane)>> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let x = model.sample(Stream::Real, i);
            let tx = bottleneck_reconstruct(&x, sim)?;
            Ok((x.plane(0), tx.plane(0)))
        })
        .collect()
}

/// Compares radially averaged power of `x` and `T(x)` over the high band.
pub fn contraction_on(pairs: &[(Plane, Plane)]) -> Result<TheoremReport> {
    if pairs.is_empty() {
        return Err(Error::Empty("no images".into()));
    }
    let (px, ptx): (Vec<_>, Vec<_>) = pairs
        .par_iter()
        .map(|(x, tx)| Ok((radial_psd(x, CONTRACTION_BINS)?, radial_psd(tx, CONTRACTION_BINS)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let (sx, stx) = (mean_psd(&px)?, mean_psd(&ptx)?);
    let mut report = TheoremReport::new("contraction", BTreeMap::new());
    report.thresholds.insert("high_band_cutoff".into(), HIGH_BAND_CUTOFF);
    report.thresholds.insert("mean_ratio_max".into(), CONTRACTION_RATIO_MAX);
    let high = sx.bins_above(HIGH_BAND_CUTOFF);
    for &b in &high {
        let band = BandPower {
            bin: b,
            freq_lo: sx.edges[b],
            freq_hi: sx.edges[b + 1],
            power_x: sx.power[b],
            power_tx: stx.power[b],
            ratio: ratio(stx.power[b], sx.power[b]),
        };
        report.push(Check::new(
            format!("bin{b}_contracts"),
            band.power_tx - band.power_x,
            "<=",
            POWER_TOL,
        ));
        report.bands.push(band);
    }
    let ratios: Vec<f64> = report.bands.iter().filter_map(|b| b.ratio).collect();
    let mean_ratio = if ratios.is_empty() { 0.0 } else { ratios.iter().sum::<f64>() / ratios.len() as f64 };
    report.metrics.insert("mean_high_ratio".into(), mean_ratio);
    report.metrics.insert("high_power_x".into(), sx.band_power(HIGH_BAND_CUTOFF));
    report.metrics.insert("high_power_tx".into(), stx.band_power(HIGH_BAND_CUTOFF));
    report.push(Check::new("mean_high_ratio", mean_ratio, "<", CONTRACTION_RATIO_MAX));
    Ok(report)
}

/// High-band power of `T(x)` never exceeds that of `x`, averaged over
/// `n_images` synthetic samples.
pub fn check_variance_contraction(
    model: &NoisyImageModel,
    sim: &BottleneckSim,
    n_images: usize,
) -> Result<TheoremReport> {
    model.validate()?;
    if n_images < 8 {
        return Err(Error::param(format!("need at least 8 images, got {n_images}")));
    }
    let pairs = real_pairs(model, sim, n_images)?;
    let mut report = contraction_on(&pairs)?;
    report.params = params(model, sim, n_images);
    Ok(report)
}

/// Least-squares slope of `ln(ratio)` against the scale offset.
fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(d, r)| (d, r.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Haar detail energies of `x` and `T(x)` per level, with the retained
/// ratio checked to shrink at finer scales.
pub fn wavelet_decay_on(pairs: &[(Plane, Plane)], sim: &BottleneckSim) -> Result<TheoremReport> {
    let Some((first, _)) = pairs.first() else {
        return Err(Error::Empty("no images".into()));
    };
    let c = sim.cutoff_level();
    let side = first.width.min(first.height);
    if !first.width.is_power_of_two() || first.width != first.height || side.trailing_zeros() as usize <= c + 2 {
        return Err(Error::param(format!(
            "wavelet check needs a square power-of-two image deeper than {} levels, got {}x{}",
            c + 2,
            first.width,
            first.height
        )));
    }
    let levels = c + 1;
    let profiles = pairs
        .par_iter()
        .map(|(x, tx)| Ok((haar_energies(x, levels)?, haar_energies(tx, levels)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut report = TheoremReport::new("wavelet", BTreeMap::new());
    report.metrics.insert("cutoff_level".into(), c as f64);
    for level in 1..=levels {
        let ex: f64 = profiles.iter().map(|(p, _)| p.detail(level).unwrap_or(0.0)).sum();
        let etx: f64 = profiles.iter().map(|(_, q)| q.detail(level).unwrap_or(0.0)).sum();
        let n = profiles.len() as f64;
        report.scales.push(ScaleRatio {
            level,
            offset: c as isize + 1 - level as isize,
            energy_x: ex / n,
            energy_tx: etx / n,
            ratio: ratio(etx, ex),
        });
    }
    report.scales.sort_by_key(|s| s.offset);
    for s in report.scales.clone() {
        if s.offset >= 1 {
            report.push(Check::new(
                format!("offset{}_energy_contracts", s.offset),
                s.energy_tx - s.energy_x,
                "<=",
                POWER_TOL,
            ));
        }
    }
    let base = report.scales[0].ratio.unwrap_or(0.0);
    for s in report.scales.clone().iter().filter(|s| (1..=2).contains(&s.offset)) {
        report.push(Check::new(
            format!("offset{}_ratio_below_cutoff_ratio", s.offset),
            s.ratio.unwrap_or(0.0) - base,
            "<=",
            POWER_TOL,
        ));
    }
    let points: Vec<(f64, f64)> = report
        .scales
        .iter()
        .filter_map(|s| s.ratio.map(|r| (s.offset as f64, r)))
        .collect();
    if let Some(slope) = log_slope(&points) {
        report.metrics.insert("log_ratio_slope".into(), slope);
    }
    report.metrics.insert("predicted_slope".into(), -(4f64.ln()));
    Ok(report)
}

pub fn check_wavelet_decay(model: &NoisyImageModel, sim: &BottleneckSim, n_images: usize) -> Result<TheoremReport> {
    model.validate()?;
    if n_images == 0 {
        return Err(Error::param("need at least one image"));
    }
    let pairs = real_pairs(model, sim, n_images)?;
    let mut report = wavelet_decay_on(&pairs, sim)?;
    report.params = params(model, sim, n_images);
    Ok(report)
}

/// One simulated item: the real image, its standard inpaint and its exchange.
pub struct SimItem {
    pub real: RasterImage,
    pub standard: RasterImage,
    pub exchanged: RasterImage,
    pub reconstructed: RasterImage,
    pub mask: crate::imgcore::BinaryMask,
}

/// Standard inpaint `T(x·(1-M) + x'·M)` with independent content `x'`,
/// and its exchange back into `x`.
pub fn simulate_item(
    model: &NoisyImageModel,
    sim: &BottleneckSim,
    index: u64,
    shape: &RectShape,
    mask_ratio: f64,
) -> Result<SimItem> {
    let real = model.sample(Stream::Real, index);
    let foreground = model.sample(Stream::Foreground, index);
    let mask = shape.mask(model.size, mask_ratio);
    let composite = exchange(&real, &foreground, &mask)?;
    let standard = bottleneck_reconstruct(&composite, sim)?;
    let exchanged = exchange(&real, &standard, &mask)?;
    let reconstructed = bottleneck_reconstruct(&real, sim)?;
    Ok(SimItem {
        real,
        standard,
        exchanged,
        reconstructed,
        mask,
    })
}

fn mask_shape(model: &NoisyImageModel, index: u64) -> RectShape {
    RectShape::draw(&mut model.rng(Stream::Mask, index))
}

fn calibrate(model: &NoisyImageModel, n: usize) -> Result<FrequencyOracle> {
    let reals: Vec<RasterImage> = (0..n.max(20) as u64)
        .into_par_iter()
        .map(|i| model.sample(Stream::Calibration, i))
        .collect();
    FrequencyOracle::calibrate(&reals)
}

fn background_exact(item: &SimItem) -> bool {
    let ch = item.real.channels();
    (0..item.real.height()).all(|y| {
        (0..item.real.width()).all(|x| {
            item.mask.get(x, y)
                || (0..ch).all(|c| item.exchanged.get(x, y, c).to_bits() == item.real.get(x, y, c).to_bits())
        })
    })
}

fn validate_demo(n: usize, mask_ratio: f64) -> Result<()> {
    if n < 50 {
        return Err(Error::param(format!("need at least 50 images per class, got {n}")));
    }
    if !(mask_ratio > 0.0 && mask_ratio < 1.0) {
        return Err(Error::param(format!("mask ratio must lie in (0,1), got {mask_ratio}")));
    }
    Ok(())
}

/// Scores real, standard-inpainted and exchanged corpora with the
/// frequency oracle and compares the two AUCs and spectral fingerprints.
pub fn detectability_gap_demo(
    model: &NoisyImageModel,
    sim: &BottleneckSim,
    mask_ratio: f64,
    n: usize,
) -> Result<TheoremReport> {
    model.validate()?;
    validate_demo(n, mask_ratio)?;
    let oracle = calibrate(model, n / 2)?;
    let items = (0..n as u64)
        .into_par_iter()
        .map(|i| simulate_item(model, sim, i, &mask_shape(model, i), mask_ratio))
        .collect::<Result<Vec<_>>>()?;
    let scored = items
        .par_iter()
        .map(|it| Ok((oracle.score(&it.real)?, oracle.score(&it.standard)?, oracle.score(&it.exchanged)?)))
        .collect::<Result<Vec<_>>>()?;

    let corpus = |fake: &dyn Fn(&(f64, f64, f64)) -> f64| -> Result<Vec<DetectionRecord>> {
        let mut recs = Vec::with_capacity(2 * n);
        for (i, s) in scored.iter().enumerate() {
            recs.push(DetectionRecord::new(format!("real{i}"), Label::Real, s.0)?);
            recs.push(DetectionRecord::new(format!("fake{i}"), Label::Fake, fake(s))?);
        }
        Ok(recs)
    };
    let std_report = classification_metrics(&corpus(&|s| s.1)?, DEFAULT_THRESHOLD)?;
    let ex_report = classification_metrics(&corpus(&|s| s.2)?, DEFAULT_THRESHOLD)?;

    let config = FingerprintConfig { resize_to: None };
    let fp_real = fingerprint(items.iter().map(|it| &it.real), &config)?;
    let fp_std = fingerprint(items.iter().map(|it| &it.standard), &config)?;
    let fp_ex = fingerprint(items.iter().map(|it| &it.exchanged), &config)?;
    let mse_std = spectral_mse(&fp_real, &fp_std)?;
    let mse_ex = spectral_mse(&fp_real, &fp_ex)?;
    let mse_ratio = if mse_ex > 0.0 { mse_std / mse_ex } else { f64::INFINITY };
    let bg_exact = items.iter().all(background_exact);
    let measured_ratio = items.iter().map(|it| it.mask.ratio()).sum::<f64>() / n as f64;

    let mut p = params(model, sim, n);
    p.insert("mask_ratio".into(), json!(mask_ratio));
    p.insert("threshold".into(), json!(DEFAULT_THRESHOLD));
    let mut report = TheoremReport::new("gap", p);
    report.thresholds = BTreeMap::from([
        ("gap_min".to_string(), GAP_MIN),
        ("auc_ex_max".to_string(), AUC_EX_MAX),
        ("spectral_mse_ratio_min".to_string(), SPECTRAL_MSE_RATIO_MIN),
    ]);
    let gap = std_report.auc - ex_report.auc;
    report.metrics = BTreeMap::from([
        ("auc_std".to_string(), std_report.auc),
        ("auc_ex".to_string(), ex_report.auc),
        ("acc_std".to_string(), std_report.acc),
        ("acc_ex".to_string(), ex_report.acc),
        ("gap".to_string(), gap),
        ("spectral_mse_std".to_string(), mse_std),
        ("spectral_mse_ex".to_string(), mse_ex),
        ("spectral_mse_ratio".to_string(), mse_ratio),
        ("oracle_reference_power".to_string(), oracle.reference),
        ("measured_mask_ratio".to_string(), measured_ratio),
    ]);
    report.push(Check::new("background_exact", f64::from(u8::from(bg_exact)), "==", 1.0));
    report.push(Check::new("gap", gap, ">=", GAP_MIN));
    report.push(Check::new("auc_ex", ex_report.auc, "<=", AUC_EX_MAX));
    report.push(Check::new("spectral_mse_ratio", mse_ratio, ">=", SPECTRAL_MSE_RATIO_MIN));
    Ok(report)
}

/// Exchange accuracy per mask-ratio bin. Each index contributes one real
/// image and, for every bin, an exchanged version with a nested mask whose
/// ratio falls in that bin.
pub fn mask_ratio_strata_demo(
    model: &NoisyImageModel,
    sim: &BottleneckSim,
    edges: &[f64],
    per_bin: usize,
) -> Result<TheoremReport> {
    model.validate()?;
    crate::evalharness::validate_edges(edges)?;
    if per_bin < 10 {
        return Err(Error::param(format!("need at least 10 items per bin, got {per_bin}")));
    }
    let oracle = calibrate(model, per_bin / 2)?;
    let n_bins = edges.len() - 1;
    let rows = (0..per_bin as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = model.rng(Stream::Mask, i);
            let shape = RectShape::draw(&mut rng);
            let u: f64 = rand::Rng::random_range(&mut rng, 0.1..0.9);
            let mut out = Vec::with_capacity(2 * n_bins);
            for b in 0..n_bins {
                let target = edges[b] + (edges[b + 1] - edges[b]) * u;
                let item = simulate_item(model, sim, i, &shape, target)?;
                let r = item.mask.ratio();
                if b == 0 {
                    let real_score = oracle.score(&item.real)?;
                    for bb in 0..n_bins {
                        let t = edges[bb] + (edges[bb + 1] - edges[bb]) * u;
                        let rr = if bb == 0 { r } else { shape.mask(model.size, t).ratio() };
                        out.push((DetectionRecord::new(format!("real{i}_b{bb}"), Label::Real, real_score)?, rr));
                    }
                }
                out.push((
                    DetectionRecord::new(format!("ex{i}_b{b}"), Label::Fake, oracle.score(&item.exchanged)?)?,
                    r,
                ));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let records: Vec<(DetectionRecord, f64)> = rows.into_iter().flatten().collect();
    let strata = stratify_by_mask_ratio(&records, edges, DEFAULT_THRESHOLD)?;

    let mut p = params(model, sim, per_bin);
    p.insert("edges".into(), json!(edges));
    p.insert("threshold".into(), json!(DEFAULT_THRESHOLD));
    let mut report = TheoremReport::new("strata", p);
    for (b, s) in strata.iter().enumerate() {
        if let Some(acc) = s.accuracy {
            report.metrics.insert(format!("acc_bin{b}"), acc);
        }
        if let Some(r) = &s.report {
            report.metrics.insert(format!("auc_bin{b}"), r.auc);
        }
    }
    for b in 1..strata.len() {
        let (prev, cur) = (strata[b - 1].accuracy, strata[b].accuracy);
        match (prev, cur) {
            (Some(a), Some(c)) => report.push(Check::new(format!("acc_bin{b}_non_decreasing"), c - a, ">=", 0.0)),
            _ => report.push(Check::new(format!("bin{b}_populated"), 0.0, "==", 1.0)),
        }
    }
    report.strata = strata;
    Ok(report)
}

/// Image- and pixel-level correlations between reconstruction error,
/// inpainting difference and high-frequency content on simulated items,
/// plus a shuffled-pairing control.
pub fn correlation_demo(
    model: &NoisyImageModel,
    sim: &BottleneckSim,
    mask_ratio: f64,
    n: usize,
) -> Result<TheoremReport> {
    model.validate()?;
    validate_demo(n, mask_ratio)?;
    let signals = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let it = simulate_item(model, sim, i, &mask_shape(model, i), mask_ratio)?;
            PixelSignals::from_images(&it.real, &it.standard, &it.reconstructed, Some(&it.mask))
        })
        .collect::<Result<Vec<_>>>()?;
    let means: Vec<_> = signals.iter().map(|s| s.means()).collect();
    let image = image_level_correlations(&means)?;
    let pixel = pixel_level_correlations(&signals, Region::Full)?;
    let vae: Vec<f64> = means.iter().map(|m| m.vae_loss).collect();
    let mut hf: Vec<f64> = means.iter().map(|m| m.high_freq).collect();
    hf.shuffle(&mut model.rng(Stream::Shuffle, 0));
    let shuffled = pearson(&vae, &hf)?;

    let mut p = params(model, sim, n);
    p.insert("mask_ratio".into(), json!(mask_ratio));
    let mut report = TheoremReport::new("correlation", p);
    report.thresholds = BTreeMap::from([
        ("vae_highfreq_min".to_string(), CORRELATION_MIN),
        ("shuffled_max".to_string(), SHUFFLED_MAX),
    ]);
    for pair in &image.pairs {
        report.metrics.insert(format!("image_{}_pearson", pair.pair), pair.pearson);
        report.metrics.insert(format!("image_{}_spearman", pair.pair), pair.spearman);
    }
    for pair in &pixel.pairs {
        report.metrics.insert(format!("pixel_{}_pearson", pair.pair), pair.pearson);
    }
    report.metrics.insert("shuffled_vae_highfreq_pearson".into(), shuffled);
    let r = image.pair("vae_highfreq").map_or(f64::NAN, |p| p.pearson);
    report.push(Check::new("vae_highfreq", r, ">", CORRELATION_MIN));
    report.push(Check::new("shuffled_abs", shuffled.abs(), "<", SHUFFLED_MAX));
    report.correlations = vec![image, pixel];
    Ok(report)
}
