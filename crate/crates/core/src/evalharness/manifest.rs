//! Detector-score manifests: CSV with header `item_id,label,score`
//! and optional `mask_path`, `saliency_path`, `mask_ratio` columns.
//! Relative paths resolve against the manifest's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::classification::{DetectionRecord, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub record: DetectionRecord,
    pub mask_path: Option<PathBuf>,
    pub saliency_path: Option<PathBuf>,
    pub mask_ratio: Option<f64>,
}

/// Resolves `value` against `base` unless it is absolute.
pub fn resolve_path(base: &Path, value: &str) -> PathBuf {
    let p = Path::new(value);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub(crate) fn manifest_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Manifest {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Opens a headed CSV and maps column names to indices, failing when a
/// required column is missing.
pub(crate) fn open_csv(path: &Path, required: &[&str]) -> Result<(csv::Reader<std::fs::File>, csv::StringRecord)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| manifest_error(path, 1, e.to_string()))?
        .clone();
    for col in required {
        if !headers.iter().any(|h| h == *col) {
            return Err(manifest_error(
                path,
                1,
                format!("missing header column `{col}` (found: {})", headers.iter().collect::<Vec<_>>().join(",")),
            ));
        }
    }
    Ok((reader, headers))
}

pub(crate) fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h == name)
}

/// Reads and validates a detector-score manifest. Referenced files are not
/// opened here.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestRow>> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
    let (mut reader, headers) = open_csv(path, &["item_id", "label", "score"])?;
    let id_col = column(&headers, "item_id").unwrap();
    let label_col = column(&headers, "label").unwrap();
    let score_col = column(&headers, "score").unwrap();
    let mask_col = column(&headers, "mask_path");
    let sal_col = column(&headers, "saliency_path");
    let ratio_col = column(&headers, "mask_ratio");

    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for result in reader.records() {
        let rec = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            manifest_error(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| rec.get(i).unwrap_or("");
        let optional = |c: Option<usize>| c.map(field).filter(|s| !s.is_empty());

        let item_id = field(id_col).to_string();
        if item_id.is_empty() {
            return Err(manifest_error(path, line, "empty item_id"));
        }
        if !seen.insert(item_id.clone()) {
            return Err(manifest_error(path, line, format!("duplicate item_id `{item_id}`")));
        }
        let label = Label::parse(field(label_col))
            .ok_or_else(|| manifest_error(path, line, format!("bad label `{}`", field(label_col))))?;
        let score: f64 = field(score_col)
            .parse()
            .map_err(|_| manifest_error(path, line, format!("bad score `{}`", field(score_col))))?;
        if !(0.0..=1.0).contains(&score) {
            return Err(manifest_error(path, line, format!("score {score} outside [0,1]")));
        }
        let mask_ratio = match optional(ratio_col) {
            Some(s) => {
                let r: f64 = s
                    .parse()
                    .map_err(|_| manifest_error(path, line, format!("bad mask_ratio `{s}`")))?;
                if !(0.0..=1.0).contains(&r) {
                    return Err(manifest_error(path, line, format!("mask_ratio {r} outside [0,1]")));
                }
                Some(r)
            }
            None => None,
        };
        rows.push(ManifestRow {
            record: DetectionRecord { item_id, label, score },
            mask_path: optional(mask_col).map(|s| resolve_path(&base, s)),
            saliency_path: optional(sal_col).map(|s| resolve_path(&base, s)),
            mask_ratio,
        });
    }
    Ok(rows)
}
