//! Slow reference implementations shared by the oracle and acceptance tests.
#![allow(dead_code)]

use inpx_core::evalharness::{DetectionRecord, Label};
use inpx_core::RasterImage;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn naive_dft_magnitude(p: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    for v in 0..h {
        for u in 0..w {
            let (mut re, mut im) = (0.0, 0.0);
            for y in 0..h {
                for x in 0..w {
                    let a = -2.0 * PI * (u as f64 * x as f64 / w as f64 + v as f64 * y as f64 / h as f64);
                    re += p[y * w + x] * a.cos();
                    im += p[y * w + x] * a.sin();
                }
            }
            out[v * w + u] = (re * re + im * im).sqrt();
        }
    }
    out
}

pub fn oracle_fingerprint(img: &RasterImage) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let luma: Vec<f64> = (0..w * h)
        .map(|i| {
            let p = &img.data()[i * 3..i * 3 + 3];
            (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]).clamp(0.0, 1.0)
        })
        .collect();
    let (cw, ch) = (w - 1, h - 1);
    let mut cd = vec![0.0; cw * ch];
    for y in 0..ch {
        for x in 0..cw {
            let l = |xx: usize, yy: usize| luma[yy * w + xx];
            cd[y * cw + x] = (l(x, y) - l(x + 1, y) - l(x, y + 1) + l(x + 1, y + 1)).abs();
        }
    }
    let mag = naive_dft_magnitude(&cd, cw, ch);
    let total: f64 = mag.iter().sum();
    let mut shifted = vec![0.0; cw * ch];
    for v in 0..ch {
        for u in 0..cw {
            shifted[((v + ch / 2) % ch) * cw + (u + cw / 2) % cw] = mag[v * cw + u] / total;
        }
    }
    shifted
}

pub fn all_pairs_auc(records: &[DetectionRecord]) -> f64 {
    let pos: Vec<f64> = records.iter().filter(|r| r.label == Label::Fake).map(|r| r.score).collect();
    let neg: Vec<f64> = records.iter().filter(|r| r.label == Label::Real).map(|r| r.score).collect();
    let mut wins = 0.0;
    for p in &pos {
        for n in &neg {
            wins += if p > n { 1.0 } else if p == n { 0.5 } else { 0.0 };
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

/// Precision/recall at every distinct score threshold, then the step sum.
pub fn sweep_ap(scores: &[f64], labels: &[bool]) -> Option<f64> {
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos == 0 {
        return None;
    }
    let mut ts: Vec<f64> = scores.to_vec();
    ts.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ts.dedup();
    let (mut ap, mut prev_recall) = (0.0, 0.0);
    for t in ts {
        let tp = scores.iter().zip(labels).filter(|(s, l)| **s >= t && **l).count() as f64;
        let predicted = scores.iter().filter(|s| **s >= t).count() as f64;
        let recall = tp / n_pos as f64;
        ap += (recall - prev_recall) * (tp / predicted);
        prev_recall = recall;
    }
    Some(ap)
}

pub fn direct_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

/// Rank of each element as 1 + (#smaller) + (#equal - 1)/2.
pub fn brute_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|v| {
            let less = x.iter().filter(|o| *o < v).count() as f64;
            let eq = x.iter().filter(|o| *o == v).count() as f64;
            1.0 + less + (eq - 1.0) / 2.0
        })
        .collect()
}


/// Ten-ish records on a coarse score grid (so ties occur), both classes present.
pub fn random_records(r: &mut ChaCha8Rng, n: usize) -> Vec<DetectionRecord> {
    loop {
        let recs: Vec<DetectionRecord> = (0..n)
            .map(|i| {
                let label = if r.random_bool(0.5) { Label::Fake } else { Label::Real };
                // coarse grid so ties occur
                let score = f64::from(r.random_range(0..=10u8)) / 10.0;
                DetectionRecord::new(format!("{i}"), label, score).unwrap()
            })
            .collect();
        let pos = recs.iter().filter(|r| r.label.is_fake()).count();
        if pos > 0 && pos < n {
            return recs;
        }
    }
}
