//! CSV manifests read by the batch subcommands. Paths resolve against the
//! manifest's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use inpx_core::evalharness::resolve_path;
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// Row of a matched (original, generated, mask) manifest.
#[derive(Debug, Clone, Deserialize)]
pub struct TripletRow {
    pub item_id: String,
    pub original_path: PathBuf,
    pub generated_path: PathBuf,
    pub mask_path: PathBuf,
    #[serde(default)]
    pub dataset: Option<String>,
}

/// Row of a correlation manifest.
#[derive(Debug, Clone, Deserialize)]
pub struct SignalRow {
    pub item_id: String,
    pub original_path: PathBuf,
    pub inpainted_path: PathBuf,
    pub reconstructed_path: PathBuf,
    #[serde(default)]
    pub mask_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct LocalizationRow {
    pub item_id: String,
    pub saliency_path: PathBuf,
    pub mask_path: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PathRow {
    pub path: PathBuf,
}

pub trait Row {
    fn id(&self) -> Option<&str>;
    fn resolve(&mut self, base: &Path);
}

fn fix(base: &Path, p: &mut PathBuf) {
    *p = resolve_path(base, &p.to_string_lossy());
}

impl Row for TripletRow {
    fn id(&self) -> Option<&str> {
        Some(&self.item_id)
    }
    fn resolve(&mut self, base: &Path) {
        fix(base, &mut self.original_path);
        fix(base, &mut self.generated_path);
        fix(base, &mut self.mask_path);
    }
}

impl Row for SignalRow {
    fn id(&self) -> Option<&str> {
        Some(&self.item_id)
    }
    fn resolve(&mut self, base: &Path) {
        fix(base, &mut self.original_path);
        fix(base, &mut self.inpainted_path);
        fix(base, &mut self.reconstructed_path);
        if let Some(m) = &mut self.mask_path {
            fix(base, m);
        }
    }
}

impl Row for LocalizationRow {
    fn id(&self) -> Option<&str> {
        Some(&self.item_id)
    }
    fn resolve(&mut self, base: &Path) {
        fix(base, &mut self.saliency_path);
        fix(base, &mut self.mask_path);
    }
}

impl Row for PathRow {
    fn id(&self) -> Option<&str> {
        None
    }
    fn resolve(&mut self, base: &Path) {
        fix(base, &mut self.path);
    }
}

/// Reads every row, rejecting malformed lines and duplicate ids.
pub fn load_rows<T: Row + DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening manifest {}", path.display()))?;
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<T>().enumerate() {
        let mut row = rec.with_context(|| format!("{}: row {}", path.display(), i + 1))?;
        if let Some(id) = row.id() {
            if id.is_empty() {
                bail!("{}: row {} has an empty item_id", path.display(), i + 1);
            }
            if !seen.insert(id.to_string()) {
                bail!("{}: duplicate item_id `{id}`", path.display());
            }
        }
        row.resolve(&base);
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("manifest {} has no rows", path.display());
    }
    Ok(rows)
}
