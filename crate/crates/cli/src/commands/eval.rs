//! Detector evaluation subcommands.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use inpx_core::evalharness::{
    classification_metrics, load_manifest, localization_metrics, stratify_by_mask_ratio, validate_edges,
    LocalizationConfig, SaliencyMap, StratumReport, DEFAULT_EDGES, DEFAULT_THRESHOLD, LOCALIZATION_SIZE,
};
use inpx_core::imgcore::{load_image, load_mask};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::manifest::{load_rows, LocalizationRow};
use crate::run::{emit, Ctx, Envelope, ItemError, Status};

fn check_threshold(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        bail!("--threshold must lie in [0,1], got {t}");
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalClsArgs {
    /// CSV with item_id, label, score.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
}

pub fn classification(ctx: &Ctx, args: &EvalClsArgs) -> Result<Status> {
    check_threshold(args.threshold)?;
    let config = ctx.config("eval-cls", args)?;
    let records: Vec<_> = load_manifest(&args.manifest)?.into_iter().map(|r| r.record).collect();
    let report = classification_metrics(&records, args.threshold)?;
    emit(&Envelope::new(config, &report, Vec::new())?, ctx.out.as_deref())?;
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalLocArgs {
    /// CSV with item_id, saliency_path, mask_path.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Common comparison grid side.
    #[arg(long, default_value_t = LOCALIZATION_SIZE)]
    pub size: usize,
    /// Compare at each saliency map's own size.
    #[arg(long)]
    pub native: bool,
}

#[derive(Debug, Serialize)]
struct LocItem {
    item_id: String,
    iou: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ap: Option<f64>,
}

#[derive(Debug, Serialize)]
struct LocResult {
    miou: f64,
    map: f64,
    n_items: usize,
    n_ap_skipped: usize,
    items: Vec<LocItem>,
}

pub fn localization(ctx: &Ctx, args: &EvalLocArgs) -> Result<Status> {
    if !args.native && args.size == 0 {
        bail!("--size must be positive");
    }
    let config = ctx.config("eval-loc", args)?;
    let rows: Vec<LocalizationRow> = load_rows(&args.manifest)?;
    let loaded: Vec<(String, Result<(SaliencyMap, inpx_core::BinaryMask)>)> = rows
        .par_iter()
        .map(|r| {
            let item = (|| -> Result<_> {
                let sal = load_image(&r.saliency_path)
                    .with_context(|| format!("loading saliency {}", r.saliency_path.display()))?;
                let mask = load_mask(&r.mask_path).with_context(|| format!("loading mask {}", r.mask_path.display()))?;
                Ok((SaliencyMap::from_image(&sal), mask))
            })();
            (r.item_id.clone(), item)
        })
        .collect();
    let mut ids = Vec::new();
    let mut items = Vec::new();
    let mut failures = Vec::new();
    for (id, r) in loaded {
        match r {
            Ok(x) => {
                ids.push(id);
                items.push(x);
            }
            Err(e) => {
                eprintln!("warning: {id}: {e:#}");
                failures.push(ItemError {
                    item_id: id,
                    error: format!("{e:#}"),
                });
            }
        }
    }
    let loc_config = LocalizationConfig {
        resize_to: (!args.native).then_some(args.size),
    };
    let report = localization_metrics(&items, &loc_config)?;
    let result = LocResult {
        miou: report.miou,
        map: report.map,
        n_items: report.n_items,
        n_ap_skipped: report.n_ap_skipped,
        items: report
            .items
            .into_iter()
            .map(|i| LocItem {
                item_id: ids[i.index].clone(),
                iou: i.iou,
                ap: i.ap,
            })
            .collect(),
    };
    let status = if failures.is_empty() { Status::Ok } else { Status::Partial };
    emit(&Envelope::new(config, &result, failures)?, ctx.out.as_deref())?;
    Ok(status)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalStrataArgs {
    /// CSV with item_id, label, score and either mask_ratio or mask_path.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated mask-ratio bin edges.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EDGES.to_vec())]
    pub edges: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
}

/// Result document of `eval-strata`, also read back by `report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrataResult {
    pub threshold: f64,
    pub edges: Vec<f64>,
    pub strata: Vec<StratumReport>,
}

pub fn strata(ctx: &Ctx, args: &EvalStrataArgs) -> Result<Status> {
    check_threshold(args.threshold)?;
    validate_edges(&args.edges)?;
    let config = ctx.config("eval-strata", args)?;
    let rows = load_manifest(&args.manifest)?;
    let ratios: Vec<Result<f64>> = rows
        .par_iter()
        .map(|r| match (r.mask_ratio, &r.mask_path) {
            (Some(v), _) => Ok(v),
            (None, Some(p)) => Ok(load_mask(p).with_context(|| format!("loading mask {}", p.display()))?.ratio()),
            (None, None) => bail!("row has neither mask_ratio nor mask_path"),
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (row, ratio) in rows.into_iter().zip(ratios) {
        match ratio {
            Ok(v) => records.push((row.record, v)),
            Err(e) => {
                eprintln!("warning: {}: {e:#}", row.record.item_id);
                failures.push(ItemError {
                    item_id: row.record.item_id,
                    error: format!("{e:#}"),
                });
            }
        }
    }
    if records.is_empty() {
        bail!("no usable rows in {}", args.manifest.display());
    }
    let result = StrataResult {
        threshold: args.threshold,
        edges: args.edges.clone(),
        strata: stratify_by_mask_ratio(&records, &args.edges, args.threshold)?,
    };
    let status = if failures.is_empty() { Status::Ok } else { Status::Partial };
    emit(&Envelope::new(config, &result, failures)?, ctx.out.as_deref())?;
    Ok(status)
}
