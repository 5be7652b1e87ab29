use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::resize::{resize_bilinear, resize_mask_nearest};
use crate::imgcore::{BinaryMask, Plane, RasterImage};

/// Side length saliency maps and masks are compared at.
pub const LOCALIZATION_SIZE: usize = 224;
/// Saliency level at or above which a pixel counts as predicted manipulated.
pub const SALIENCY_THRESHOLD: f64 = 0.5;

/// Continuous localization heatmap in `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaliencyMap {
    pub width: usize,
    pub height: usize,
    pub value: Vec<f64>,
}

impl SaliencyMap {
    pub fn new(width: usize, height: usize, value: Vec<f64>) -> Result<Self> {
        if value.len() != width * height {
            return Err(Error::dims("saliency map size does not match its data"));
        }
        if let Some(bad) = value.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::param(format!("saliency value {bad} outside [0,1]")));
        }
        Ok(SaliencyMap {
            width,
            height,
            value,
        })
    }

    /// Uses the luma of an image as saliency.
    pub fn from_image(img: &RasterImage) -> Self {
        let l = crate::spectra::to_luma(img);
        SaliencyMap {
            width: l.width(),
            height: l.height(),
            value: l.into_data(),
        }
    }

    fn resized(&self, w: usize, h: usize) -> SaliencyMap {
        let p = Plane {
            width: self.width,
            height: self.height,
            data: self.value.clone(),
        };
        let r = resize_bilinear(&p, w, h);
        SaliencyMap {
            width: w,
            height: h,
            value: r.data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizationConfig {
    /// Common comparison grid; `None` compares at the saliency map's size.
    pub resize_to: Option<usize>,
}

impl Default for LocalizationConfig {
    fn default() -> Self {
        LocalizationConfig {
            resize_to: Some(LOCALIZATION_SIZE),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemLocalization {
    pub index: usize,
    pub iou: f64,
    /// `None` when the ground-truth mask is empty.
    pub ap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub miou: f64,
    pub map: f64,
    pub n_items: usize,
    /// Items left out of mAP because their mask was empty.
    pub n_ap_skipped: usize,
    pub items: Vec<ItemLocalization>,
}

/// Intersection over union of a thresholded saliency map; both empty counts as 1.
pub fn iou(saliency: &[f64], mask: &[bool], threshold: f64) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (&s, &m) in saliency.iter().zip(mask) {
        let p = s >= threshold;
        inter += usize::from(p && m);
        union += usize::from(p || m);
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Average precision of a ranked pixel list: `Σ (R_k - R_{k-1}) P_k` over
/// distinct score thresholds, highest first. `None` without positives.
pub fn average_precision(scores: &[f64], labels: &[bool]) -> Option<f64> {
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let (mut tp, mut seen) = (0usize, 0usize);
    let mut prev_recall = 0.0;
    let mut ap = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            tp += usize::from(labels[order[i]]);
            seen += 1;
            i += 1;
        }
        let recall = tp as f64 / n_pos as f64;
        ap += (recall - prev_recall) * (tp as f64 / seen as f64);
        prev_recall = recall;
    }
    Some(ap)
}

/// mIoU and mAP of saliency maps against ground-truth masks.
///
/// Both are resampled to a common grid (mask nearest-neighbour, saliency
/// bilinear). IoU uses saliency `>= 0.5`; AP ranks the continuous saliency.
pub fn localization_metrics(
    items: &[(SaliencyMap, BinaryMask)],
    config: &LocalizationConfig,
) -> Result<LocalizationReport> {
    if items.is_empty() {
        return Err(Error::Empty("no localization items".into()));
    }
    let mut out = Vec::with_capacity(items.len());
    for (index, (sal, mask)) in items.iter().enumerate() {
        let (w, h) = match config.resize_to {
            Some(s) => (s, s),
            None => (sal.width, sal.height),
        };
        let sal = sal.resized(w, h);
        let mask = resize_mask_nearest(mask, w, h);
        out.push(ItemLocalization {
            index,
            iou: iou(&sal.value, mask.bits(), SALIENCY_THRESHOLD),
            ap: average_precision(&sal.value, mask.bits()),
        });
    }
    let miou = out.iter().map(|i| i.iou).sum::<f64>() / out.len() as f64;
    let aps: Vec<f64> = out.iter().filter_map(|i| i.ap).collect();
    let map = if aps.is_empty() {
        0.0
    } else {
        aps.iter().sum::<f64>() / aps.len() as f64
    };
    Ok(LocalizationReport {
        miou,
        map,
        n_items: out.len(),
        n_ap_skipped: out.len() - aps.len(),
        items: out,
    })
}
