//! Synthetic bottleneck checks.

use anyhow::Result;
use clap::{Args, ValueEnum};
use inpx_core::theoryval::{
    check_variance_contraction, check_wavelet_decay, correlation_demo, detectability_gap_demo,
    mask_ratio_strata_demo, BottleneckMode, BottleneckSim, NoisyImageModel, DEFAULT_FACTOR, DEFAULT_IMAGE_SIZE,
    DEFAULT_MASK_RATIO, DEFAULT_SIGMA_N, DEFAULT_SIGMA_SPREAD, STRATA_EDGES,
};
use serde::Serialize;

use crate::run::{emit, Ctx, Envelope, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoryCheck {
    Contraction,
    Wavelet,
    Gap,
    Strata,
    Correlation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Box,
    Ideal,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TheoryArgs {
    #[arg(long, value_enum)]
    pub check: TheoryCheck,
    /// Downsampling factor of the simulated bottleneck.
    #[arg(long, default_value_t = DEFAULT_FACTOR)]
    pub r: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Box)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_SIGMA_N)]
    pub sigma_n: f64,
    /// Log-normal spread of the per-image noise level.
    #[arg(long, default_value_t = DEFAULT_SIGMA_SPREAD)]
    pub sigma_spread: f64,
    #[arg(long, default_value_t = DEFAULT_IMAGE_SIZE)]
    pub size: usize,
    #[arg(long, default_value_t = DEFAULT_MASK_RATIO)]
    pub mask_ratio: f64,
    /// Sample count (per bin for `strata`); each check has its own default.
    #[arg(long)]
    pub n: Option<usize>,
}

impl TheoryArgs {
    fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }
}

pub fn validate(ctx: &Ctx, args: &TheoryArgs) -> Result<Status> {
    let config = ctx.config("validate-theory", args)?;
    let model = NoisyImageModel {
        size: args.size,
        sigma_n: args.sigma_n,
        sigma_spread: args.sigma_spread,
        seed: ctx.seed,
    };
    model.validate()?;
    let mode = match args.mode {
        ModeArg::Box => BottleneckMode::BoxBilinear,
        ModeArg::Ideal => BottleneckMode::IdealLowpass,
    };
    let sim = BottleneckSim::new(args.r, mode)?;
    let report = match args.check {
        TheoryCheck::Contraction => check_variance_contraction(&model, &sim, args.n_or(32))?,
        TheoryCheck::Wavelet => check_wavelet_decay(&model, &sim, args.n_or(16))?,
        TheoryCheck::Gap => detectability_gap_demo(&model, &sim, args.mask_ratio, args.n_or(100))?,
        TheoryCheck::Strata => mask_ratio_strata_demo(&model, &sim, &STRATA_EDGES, args.n_or(50))?,
        TheoryCheck::Correlation => correlation_demo(&model, &sim, args.mask_ratio, args.n_or(100))?,
    };
    let status = if report.passed { Status::Ok } else { Status::Partial };
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {} = {} (want {} {})", c.name, c.value, c.relation, c.bound);
    }
    emit(&Envelope::new(config, &report, Vec::new())?, ctx.out.as_deref())?;
    Ok(status)
}
