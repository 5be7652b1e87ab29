//! Run configuration and the JSON report envelope shared by every subcommand.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use inpx_core::imgcore::write_atomic;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL: &str = "inpx";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// How a subcommand finished when it did not hit a configuration error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Some rows or checks failed; outputs for the rest were written.
    Partial,
}

#[derive(Debug, Clone)]
pub struct Ctx {
    pub seed: u64,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Ctx {
    pub fn out_dir(&self) -> Result<&Path> {
        let dir = self
            .out
            .as_deref()
            .context("this subcommand writes images; pass an output directory with --out")?;
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(dir)
    }

    pub fn config(&self, subcommand: &str, args: &impl Serialize) -> Result<RunConfig> {
        let params = match serde_json::to_value(args)? {
            Value::Object(map) => map.into_iter().collect(),
            Value::Null => BTreeMap::new(),
            other => BTreeMap::from([("value".to_string(), other)]),
        };
        Ok(RunConfig {
            subcommand: subcommand.to_string(),
            params,
            seed: self.seed,
            output: self.out.as_ref().map(|p| p.display().to_string()),
            jobs: self.jobs,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub output: Option<String>,
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemError {
    pub item_id: String,
    pub error: String,
}

/// Top-level shape of every emitted report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub result: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<ItemError>,
}

impl Envelope {
    pub fn new(config: RunConfig, result: &impl Serialize, failures: Vec<ItemError>) -> Result<Self> {
        Ok(Envelope {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            config,
            result: serde_json::to_value(result)?,
            failures,
        })
    }
}

/// Serializes with sorted object keys (serde_json maps are ordered).
pub fn to_sorted_json(value: &impl Serialize) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// Writes `value` to `path` atomically, or to stdout when `path` is `None`.
pub fn emit(value: &impl Serialize, path: Option<&Path>) -> Result<()> {
    let text = to_sorted_json(value)?;
    match path {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// File-name-safe form of an item id.
pub fn safe_name(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect()
}
