use serde::{Deserialize, Serialize};

use super::classification::{classification_metrics, ClassificationReport, ConfusionMatrix, DetectionRecord};
use crate::error::{Error, Result};

/// Mask-ratio bin edges used by the default stratification.
pub const DEFAULT_EDGES: [f64; 6] = [0.0, 0.05, 0.1, 0.2, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumStatus {
    Ok,
    /// No records fell into the bin.
    Empty,
    /// Only one label present; AUC is undefined but accuracy is reported.
    SingleClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumReport {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub status: StratumStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ClassificationReport>,
}

/// Checks that edges are finite, strictly increasing and inside `[0,1]`.
pub fn validate_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::param("need at least two bin edges"));
    }
    if edges.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Error::param("bin edges must lie in [0,1]"));
    }
    if edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(format!("bin edges are not strictly increasing: {edges:?}")));
    }
    Ok(())
}

/// Index of the bin holding `ratio`: `[lo, hi)`, the last bin closed on the right.
pub fn bin_index(edges: &[f64], ratio: f64) -> Option<usize> {
    let last = edges.len() - 2;
    (0..=last).find(|&i| {
        ratio >= edges[i] && (ratio < edges[i + 1] || (i == last && ratio == edges[i + 1]))
    })
}

/// Buckets records by mask ratio and scores each bucket separately.
/// Records whose ratio lies outside the edges are ignored.
pub fn stratify_by_mask_ratio(
    records: &[(DetectionRecord, f64)],
    edges: &[f64],
    threshold: f64,
) -> Result<Vec<StratumReport>> {
    validate_edges(edges)?;
    let mut buckets: Vec<Vec<DetectionRecord>> = vec![Vec::new(); edges.len() - 1];
    for (rec, ratio) in records {
        if let Some(i) = bin_index(edges, *ratio) {
            buckets[i].push(rec.clone());
        }
    }
    buckets
        .into_iter()
        .enumerate()
        .map(|(i, bucket)| {
            let (lo, hi) = (edges[i], edges[i + 1]);
            if bucket.is_empty() {
                return Ok(StratumReport {
                    lo,
                    hi,
                    n: 0,
                    status: StratumStatus::Empty,
                    accuracy: None,
                    report: None,
                });
            }
            let accuracy = ConfusionMatrix::at_threshold(&bucket, threshold).accuracy();
            let (status, report) = match classification_metrics(&bucket, threshold) {
                Ok(r) => (StratumStatus::Ok, Some(r)),
                Err(Error::Undefined(_)) => (StratumStatus::SingleClass, None),
                Err(e) => return Err(e),
            };
            Ok(StratumReport {
                lo,
                hi,
                n: bucket.len(),
                status,
                accuracy: Some(accuracy),
                report,
            })
        })
        .collect()
}
