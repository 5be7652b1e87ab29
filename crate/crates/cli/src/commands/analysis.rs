//! Spectral fingerprints and signal correlations.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use inpx_core::imgcore::{load_image, load_mask, save_image, ImageFormat};
use inpx_core::spectra::{spectral_mse, FingerprintAccumulator, FingerprintConfig, SpectralFingerprint, DEFAULT_FINGERPRINT_SIZE};
use inpx_core::stats::{image_level_correlations, pixel_level_correlations, PixelSignals, Region};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::manifest::{load_rows, PathRow, SignalRow};
use crate::run::{emit, read_json, Ctx, Envelope, ItemError, Status};

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_conflicts_with_subcommands = true)]
pub struct SpectrumArgs {
    #[command(subcommand)]
    #[serde(skip)]
    pub action: Option<SpectrumAction>,
    /// CSV with a `path` column.
    #[arg(long, required = false)]
    pub input_manifest: Option<PathBuf>,
    /// Square side images are resampled to.
    #[arg(long, default_value_t = DEFAULT_FINGERPRINT_SIZE)]
    pub size: usize,
    /// Analyse at native size instead of resampling (all inputs must match).
    #[arg(long)]
    pub native: bool,
    /// Also write a log-scaled heatmap PNG.
    #[arg(long)]
    pub heatmap: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum SpectrumAction {
    /// Spectral MSE (x1000) between two fingerprint files.
    Diff {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

#[derive(Debug, Serialize)]
struct DiffArgs<'a> {
    a: &'a PathBuf,
    b: &'a PathBuf,
}

#[derive(Debug, Serialize)]
struct DiffResult {
    mse_x1000: f64,
}

/// Reads a fingerprint, either bare or wrapped in a report envelope.
fn read_fingerprint(path: &Path) -> Result<SpectralFingerprint> {
    let v: Value = read_json(path)?;
    let inner = match v.get("result") {
        Some(r) if v.get("tool").is_some() => r.clone(),
        _ => v,
    };
    serde_json::from_value(inner).with_context(|| format!("{} does not hold a fingerprint", path.display()))
}

pub fn spectrum(ctx: &Ctx, args: &SpectrumArgs) -> Result<Status> {
    if let Some(SpectrumAction::Diff { a, b }) = &args.action {
        let config = ctx.config("spectrum diff", &DiffArgs { a, b })?;
        let mse = spectral_mse(&read_fingerprint(a)?, &read_fingerprint(b)?)?;
        emit(&Envelope::new(config, &DiffResult { mse_x1000: mse }, Vec::new())?, ctx.out.as_deref())?;
        return Ok(Status::Ok);
    }
    let Some(manifest) = &args.input_manifest else {
        bail!("spectrum needs --input-manifest (or the `diff` subcommand)");
    };
    let config = ctx.config("spectrum", args)?;
    let rows: Vec<PathRow> = load_rows(manifest)?;
    let fp_config = FingerprintConfig {
        resize_to: (!args.native).then_some(args.size),
    };
    if fp_config.resize_to == Some(0) {
        bail!("--size must be positive");
    }
    let partial = rows
        .par_iter()
        .fold(
            || (FingerprintAccumulator::new(fp_config), Vec::new()),
            |(mut acc, mut errs), row| {
                let r = load_image(&row.path)
                    .map_err(anyhow::Error::from)
                    .and_then(|img| acc.add(&img).map_err(Into::into));
                if let Err(e) = r {
                    errs.push(ItemError {
                        item_id: row.path.display().to_string(),
                        error: format!("{e:#}"),
                    });
                }
                (acc, errs)
            },
        )
        .collect::<Vec<_>>();
    let mut acc = FingerprintAccumulator::new(fp_config);
    let mut failures = Vec::new();
    for (a, e) in partial {
        acc = acc.merge(a)?;
        failures.extend(e);
    }
    failures.sort_by(|a, b| a.item_id.cmp(&b.item_id));
    for f in &failures {
        eprintln!("warning: {}: {}", f.item_id, f.error);
    }
    let fp = acc.finish().context("no image could be analysed")?;
    if let Some(h) = &args.heatmap {
        save_image(&fp.heatmap(), h, ImageFormat::Png)?;
    }
    let status = if failures.is_empty() { Status::Ok } else { Status::Partial };
    emit(&Envelope::new(config, &fp, failures)?, ctx.out.as_deref())?;
    Ok(status)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelArg {
    Image,
    Pixel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionArg {
    Full,
    Background,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorrelateArgs {
    /// CSV with item_id, original_path, inpainted_path, reconstructed_path[, mask_path].
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, value_enum, default_value_t = LevelArg::Image)]
    pub level: LevelArg,
    /// Pixel level only: restrict to pixels outside the mask.
    #[arg(long, value_enum, default_value_t = RegionArg::Full)]
    pub region: RegionArg,
}

fn signals(row: &SignalRow, want_mask: bool) -> Result<PixelSignals> {
    let load = |p: &PathBuf| load_image(p).with_context(|| format!("loading {}", p.display()));
    let mask = match (&row.mask_path, want_mask) {
        (Some(m), true) => Some(load_mask(m).with_context(|| format!("loading mask {}", m.display()))?),
        (None, true) => bail!("background region needs a mask_path"),
        _ => None,
    };
    Ok(PixelSignals::from_images(
        &load(&row.original_path)?,
        &load(&row.inpainted_path)?,
        &load(&row.reconstructed_path)?,
        mask.as_ref(),
    )?)
}

pub fn correlate(ctx: &Ctx, args: &CorrelateArgs) -> Result<Status> {
    let config = ctx.config("correlate", args)?;
    let rows: Vec<SignalRow> = load_rows(&args.manifest)?;
    let region = match args.region {
        RegionArg::Full => Region::Full,
        RegionArg::Background => Region::Background,
    };
    if args.level == LevelArg::Image && region == Region::Background {
        bail!("--region background applies to --level pixel only");
    }
    let results: Vec<(String, Result<PixelSignals>)> = rows
        .par_iter()
        .map(|r| (r.item_id.clone(), signals(r, region == Region::Background)))
        .collect();
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for (id, r) in results {
        match r {
            Ok(s) => ok.push(s),
            Err(e) => {
                eprintln!("warning: {id}: {e:#}");
                failures.push(ItemError {
                    item_id: id,
                    error: format!("{e:#}"),
                });
            }
        }
    }
    let report = match args.level {
        LevelArg::Image => image_level_correlations(&ok.iter().map(PixelSignals::means).collect::<Vec<_>>())?,
        LevelArg::Pixel => pixel_level_correlations(&ok, region)?,
    };
    let status = if failures.is_empty() { Status::Ok } else { Status::Partial };
    emit(&Envelope::new(config, &report, failures)?, ctx.out.as_deref())?;
    Ok(status)
}
