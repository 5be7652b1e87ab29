//! `inpx`: batch exchange, corruption, spectral and evaluation tooling.

mod commands;
mod manifest;
mod run;
mod steps;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use inpx_core::theoryval::DEFAULT_SEED;

use commands::{analysis, eval, images, report, theory};
use run::{Ctx, Status};

#[derive(Debug, Parser)]
#[command(name = "inpx", version, about = "Inpainting exchange, spectral diagnostics and detector evaluation")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file for reports, or output directory for image-producing commands.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Paste original pixels back outside each mask.
    Exchange(images::ExchangeArgs),
    /// Apply blur, light-spot or JPEG corruption to images.
    Corrupt(images::CorruptArgs),
    /// Average spectral fingerprint of an image set, or compare two.
    Spectrum(analysis::SpectrumArgs),
    /// Correlate reconstruction loss, inpainting difference and high-frequency content.
    Correlate(analysis::CorrelateArgs),
    /// Classification metrics from a score manifest.
    EvalCls(eval::EvalClsArgs),
    /// Localization metrics from saliency maps and masks.
    EvalLoc(eval::EvalLocArgs),
    /// Classification metrics stratified by mask ratio.
    EvalStrata(eval::EvalStrataArgs),
    /// Run one of the synthetic bottleneck checks.
    ValidateTheory(theory::TheoryArgs),
    /// Run an ordered chain of exchange and corruption steps.
    Pipeline(images::PipelineArgs),
    /// Merge or re-export reports.
    Report(report::ReportArgs),
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    if let Some(n) = cli.jobs {
        anyhow::ensure!(n > 0, "--jobs must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let ctx = Ctx {
        seed: cli.seed,
        jobs: cli.jobs,
        out: cli.out,
    };
    match &cli.command {
        Command::Exchange(a) => images::exchange(&ctx, a),
        Command::Corrupt(a) => images::corrupt(&ctx, a),
        Command::Spectrum(a) => analysis::spectrum(&ctx, a),
        Command::Correlate(a) => analysis::correlate(&ctx, a),
        Command::EvalCls(a) => eval::classification(&ctx, a),
        Command::EvalLoc(a) => eval::localization(&ctx, a),
        Command::EvalStrata(a) => eval::strata(&ctx, a),
        Command::ValidateTheory(a) => theory::validate(&ctx, a),
        Command::Pipeline(a) => images::pipeline(&ctx, a),
        Command::Report(a) => report::report(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Partial) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
