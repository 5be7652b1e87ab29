//! Image-producing subcommands: exchange, corrupt and pipeline.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use inpx_core::corrupt::{
    LightSpotParams, RngSeed, SpotCenters, DEFAULT_BLUR_SIGMA, DEFAULT_JPEG_QUALITY, DEFAULT_SPOT_GAIN,
    DEFAULT_SPOT_RADIUS,
};
use inpx_core::imgcore::{load_image, load_mask, save_image, ImageFormat};
use rayon::prelude::*;
use serde::Serialize;

use crate::manifest::{load_rows, TripletRow};
use crate::run::{emit, safe_name, Ctx, Envelope, ItemError, Status};
use crate::steps::{parse_steps, Step, DEFAULT_BAND_WIDTH, DEFAULT_KERNEL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExchangeMode {
    Hard,
    Soft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Png,
    Jpeg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SaveArgs {
    /// Encoding of written images.
    #[arg(long, value_enum, default_value_t = OutputFormat::Png)]
    pub format: OutputFormat,
    /// JPEG quality when --format jpeg.
    #[arg(long, default_value_t = 95, value_parser = clap::value_parser!(u8).range(1..=100))]
    pub save_quality: u8,
}

impl SaveArgs {
    fn image_format(&self) -> ImageFormat {
        match self.format {
            OutputFormat::Png => ImageFormat::Png,
            OutputFormat::Jpeg => ImageFormat::Jpeg {
                quality: self.save_quality,
            },
        }
    }

    fn extension(&self) -> &'static str {
        match self.format {
            OutputFormat::Png => "png",
            OutputFormat::Jpeg => "jpg",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExchangeArgs {
    /// CSV with item_id, original_path, generated_path, mask_path.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, value_enum, default_value_t = ExchangeMode::Hard)]
    pub mode: ExchangeMode,
    /// Seam band width in pixels (soft mode).
    #[arg(long, default_value_t = DEFAULT_BAND_WIDTH)]
    pub band_width: usize,
    /// Odd Gaussian kernel size (soft mode).
    #[arg(long, default_value_t = DEFAULT_KERNEL)]
    pub kernel: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub save: SaveArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PipelineArgs {
    /// CSV with item_id, original_path, generated_path, mask_path.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated steps applied to the generated image, e.g. `exchange,jpeg:80`.
    #[arg(long, default_value = "")]
    pub steps: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub save: SaveArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorruptOp {
    Blur,
    Light,
    Jpeg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorruptArgs {
    #[arg(long, value_enum)]
    pub op: CorruptOp,
    #[arg(long, default_value_t = DEFAULT_BLUR_SIGMA)]
    pub sigma: f64,
    #[arg(long, default_value_t = DEFAULT_SPOT_RADIUS)]
    pub radius: f64,
    #[arg(long, default_value_t = DEFAULT_SPOT_GAIN)]
    pub gain: f64,
    #[arg(long, default_value_t = DEFAULT_JPEG_QUALITY, value_parser = clap::value_parser!(u8).range(1..=100))]
    pub quality: u8,
    /// Input images.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub save: SaveArgs,
}

impl CorruptArgs {
    fn step(&self) -> Step {
        match self.op {
            CorruptOp::Blur => Step::Blur { sigma: self.sigma },
            CorruptOp::Light => Step::Light {
                radius: self.radius,
                gain: self.gain,
            },
            CorruptOp::Jpeg => Step::Jpeg {
                quality: self.quality,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ItemOutcome {
    pub item_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub spots: Vec<LightSpotParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchSummary {
    pub steps: Vec<String>,
    pub n_items: usize,
    pub n_ok: usize,
    pub n_failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask_ratio: Option<RatioStats>,
    pub items: Vec<ItemOutcome>,
}

impl BatchSummary {
    fn new(steps: &[Step], items: Vec<ItemOutcome>) -> Self {
        let ratios: Vec<f64> = items.iter().filter_map(|i| i.mask_ratio).collect();
        let mask_ratio = (!ratios.is_empty()).then(|| RatioStats {
            mean: ratios.iter().sum::<f64>() / ratios.len() as f64,
            min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
        let n_ok = items.iter().filter(|i| i.ok).count();
        BatchSummary {
            steps: steps.iter().map(Step::to_string).collect(),
            n_items: items.len(),
            n_ok,
            n_failed: items.len() - n_ok,
            mask_ratio,
            items,
        }
    }

    fn failures(&self) -> Vec<ItemError> {
        self.items
            .iter()
            .filter_map(|i| {
                i.error.as_ref().map(|e| ItemError {
                    item_id: i.item_id.clone(),
                    error: e.clone(),
                })
            })
            .collect()
    }

    fn status(&self) -> Status {
        if self.n_failed == 0 {
            Status::Ok
        } else {
            Status::Partial
        }
    }
}

struct Job<'a> {
    item_id: &'a str,
    dataset: Option<&'a str>,
    index: u64,
    input: &'a Path,
    original: Option<(&'a Path, &'a Path)>,
    target: PathBuf,
}

fn process(job: &Job<'_>, steps: &[Step], seed: u64, format: ImageFormat, out_dir: &Path) -> ItemOutcome {
    let mut spots = Vec::new();
    let mut mask_ratio = None;
    let result = (|| -> Result<()> {
        let mut work = load_image(job.input).with_context(|| format!("loading {}", job.input.display()))?;
        let original = match job.original {
            Some((o, m)) => {
                let img = load_image(o).with_context(|| format!("loading {}", o.display()))?;
                let mask = load_mask(m).with_context(|| format!("loading mask {}", m.display()))?;
                mask_ratio = Some(mask.ratio());
                Some((img, mask))
            }
            None => None,
        };
        let mut centers = SpotCenters::for_item(RngSeed(seed), job.index);
        for step in steps {
            work = step.apply(&work, original.as_ref(), &mut centers, &mut spots)?;
        }
        save_image(&work, &job.target, format).with_context(|| format!("writing {}", job.target.display()))?;
        Ok(())
    })();
    let output = job
        .target
        .strip_prefix(out_dir)
        .unwrap_or(&job.target)
        .display()
        .to_string();
    match result {
        Ok(()) => ItemOutcome {
            item_id: job.item_id.to_string(),
            dataset: job.dataset.map(str::to_string),
            ok: true,
            output: Some(output),
            mask_ratio,
            spots,
            error: None,
        },
        Err(e) => ItemOutcome {
            item_id: job.item_id.to_string(),
            dataset: job.dataset.map(str::to_string),
            ok: false,
            output: None,
            mask_ratio,
            spots: Vec::new(),
            error: Some(format!("{e:#}")),
        },
    }
}

fn run_manifest(ctx: &Ctx, subcommand: &str, args: &impl Serialize, manifest: &Path, steps: &[Step], save: &SaveArgs) -> Result<Status> {
    let config = ctx.config(subcommand, args)?;
    let rows: Vec<TripletRow> = load_rows(manifest)?;
    let out_dir = ctx.out_dir()?;
    let mut names = HashSet::new();
    for r in &rows {
        if !names.insert(safe_name(&r.item_id)) {
            bail!("item ids collide after sanitizing: `{}`", r.item_id);
        }
    }
    let needs_original = steps.iter().any(Step::needs_original);
    let jobs: Vec<Job> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| Job {
            item_id: &r.item_id,
            dataset: r.dataset.as_deref(),
            index: i as u64,
            input: &r.generated_path,
            original: needs_original.then_some((r.original_path.as_path(), r.mask_path.as_path())),
            target: out_dir.join(format!("{}.{}", safe_name(&r.item_id), save.extension())),
        })
        .collect();
    let format = save.image_format();
    let items: Vec<ItemOutcome> = jobs.par_iter().map(|j| process(j, steps, ctx.seed, format, out_dir)).collect();
    let summary = BatchSummary::new(steps, items);
    for f in summary.failures() {
        eprintln!("warning: {}: {}", f.item_id, f.error);
    }
    let envelope = Envelope::new(config, &summary, summary.failures())?;
    emit(&envelope, Some(&out_dir.join("summary.json")))?;
    Ok(summary.status())
}

pub fn exchange(ctx: &Ctx, args: &ExchangeArgs) -> Result<Status> {
    let step = match args.mode {
        ExchangeMode::Hard => Step::Exchange,
        ExchangeMode::Soft => Step::SoftExchange {
            band_width: args.band_width,
            kernel: args.kernel,
        },
    };
    run_manifest(ctx, "exchange", args, &args.manifest, &[step], &args.save)
}

pub fn pipeline(ctx: &Ctx, args: &PipelineArgs) -> Result<Status> {
    let steps = parse_steps(&args.steps)?;
    run_manifest(ctx, "pipeline", args, &args.manifest, &steps, &args.save)
}

fn has_image_extension(p: &Path) -> bool {
    ImageFormat::from_path(p, DEFAULT_JPEG_QUALITY).is_ok()
}

pub fn corrupt(ctx: &Ctx, args: &CorruptArgs) -> Result<Status> {
    let config = ctx.config("corrupt", args)?;
    let step = args.step();
    let single_file = match &ctx.out {
        Some(p) if has_image_extension(p) => {
            if args.inputs.len() != 1 {
                bail!("--out names a single image but {} inputs were given", args.inputs.len());
            }
            Some(p.clone())
        }
        _ => None,
    };
    let (out_dir, targets, format): (PathBuf, Vec<PathBuf>, ImageFormat) = match &single_file {
        Some(p) => {
            let format = ImageFormat::from_path(p, args.save.save_quality)?;
            let dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
            (dir, vec![p.clone()], format)
        }
        None => {
            let dir = ctx.out_dir()?.to_path_buf();
            let mut seen = HashSet::new();
            let mut targets = Vec::new();
            for input in &args.inputs {
                let stem = input
                    .file_stem()
                    .with_context(|| format!("input {} has no file name", input.display()))?
                    .to_string_lossy();
                let name = format!("{}.{}", safe_name(&stem), args.save.extension());
                if !seen.insert(name.clone()) {
                    bail!("two inputs map to the same output name `{name}`");
                }
                targets.push(dir.join(name));
            }
            (dir, targets, args.save.image_format())
        }
    };
    let ids: Vec<String> = args.inputs.iter().map(|p| p.display().to_string()).collect();
    let jobs: Vec<Job> = args
        .inputs
        .iter()
        .zip(&targets)
        .zip(&ids)
        .enumerate()
        .map(|(i, ((input, target), id))| Job {
            item_id: id,
            dataset: None,
            index: i as u64,
            input,
            original: None,
            target: target.clone(),
        })
        .collect();
    let steps = [step];
    let items: Vec<ItemOutcome> = jobs.par_iter().map(|j| process(j, &steps, ctx.seed, format, &out_dir)).collect();
    let summary = BatchSummary::new(&steps, items);
    for f in summary.failures() {
        eprintln!("warning: {}: {}", f.item_id, f.error);
    }
    let envelope = Envelope::new(config, &summary, summary.failures())?;
    match single_file {
        Some(_) => emit(&envelope, None)?,
        None => emit(&envelope, Some(&out_dir.join("summary.json")))?,
    }
    Ok(summary.status())
}
