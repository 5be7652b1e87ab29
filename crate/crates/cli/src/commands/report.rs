//! Report passthrough, merging and CSV export.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use inpx_core::imgcore::write_atomic;
use serde::Serialize;
use serde_json::Value;

use super::eval::StrataResult;
use crate::run::{emit, read_json, Ctx, Envelope, Status};

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    /// Report JSON files to merge.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Also export the merged result as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Params that may differ between mergeable strata reports.
const PER_INPUT_PARAMS: [&str; 2] = ["manifest", "edges"];

fn merge_key(e: &Envelope) -> (String, u64, Vec<(String, Value)>) {
    let params = e
        .config
        .params
        .iter()
        .filter(|(k, _)| !PER_INPUT_PARAMS.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    (e.version.clone(), e.config.seed, params)
}

fn merge_strata(docs: &[(PathBuf, Envelope)]) -> Result<StrataResult> {
    let first = &docs[0].1;
    for (path, e) in docs {
        if e.config.subcommand != "eval-strata" {
            bail!(
                "{}: only eval-strata reports can be merged (found `{}`)",
                path.display(),
                e.config.subcommand
            );
        }
        if merge_key(e) != merge_key(first) {
            bail!(
                "{} and {} were produced with conflicting configs",
                docs[0].0.display(),
                path.display()
            );
        }
    }
    let mut strata = Vec::new();
    let mut edges = Vec::new();
    let mut threshold = None;
    for (path, e) in docs {
        let r: StrataResult = serde_json::from_value(e.result.clone())
            .with_context(|| format!("{} is not a strata report", path.display()))?;
        if threshold.is_some_and(|t| t != r.threshold) {
            bail!("{}: threshold differs from earlier inputs", path.display());
        }
        threshold = Some(r.threshold);
        edges.extend(r.edges);
        strata.extend(r.strata);
    }
    strata.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    if let Some(w) = strata.windows(2).find(|w| w[1].lo < w[0].hi) {
        bail!(
            "bins [{}, {}) and [{}, {}) overlap; refusing to merge",
            w[0].lo,
            w[0].hi,
            w[1].lo,
            w[1].hi
        );
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    Ok(StrataResult {
        threshold: threshold.unwrap_or_default(),
        edges,
        strata,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_csv(result: &Value, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Ok(s) = serde_json::from_value::<StrataResult>(result.clone()) {
        w.write_record(["lo", "hi", "n", "status", "accuracy", "auc", "f1"])?;
        for b in &s.strata {
            let status = serde_json::to_value(b.status)?;
            w.write_record([
                b.lo.to_string(),
                b.hi.to_string(),
                b.n.to_string(),
                status.as_str().unwrap_or_default().to_string(),
                cell(b.accuracy),
                cell(b.report.as_ref().map(|r| r.auc)),
                cell(b.report.as_ref().map(|r| r.f1)),
            ])?;
        }
    } else if let Some(obj) = result.as_object() {
        w.write_record(["key", "value"])?;
        for (k, v) in obj {
            match v {
                Value::Number(_) | Value::String(_) | Value::Bool(_) => {
                    let text = v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
                    w.write_record([k.as_str(), text.as_str()])?;
                }
                _ => {}
            }
        }
    } else {
        bail!("result has no tabular form");
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    write_atomic(path, &bytes)?;
    Ok(())
}

pub fn report(ctx: &Ctx, args: &ReportArgs) -> Result<Status> {
    let docs = args
        .inputs
        .iter()
        .map(|p| read_json::<Envelope>(p).map(|e| (p.clone(), e)))
        .collect::<Result<Vec<_>>>()?;
    let out = if docs.len() == 1 {
        docs[0].1.clone()
    } else {
        let merged = merge_strata(&docs)?;
        let failures = docs.iter().flat_map(|(_, e)| e.failures.clone()).collect();
        Envelope::new(ctx.config("report", args)?, &merged, failures)?
    };
    if let Some(csv) = &args.csv {
        write_csv(&out.result, csv)?;
    }
    emit(&out, ctx.out.as_deref())?;
    Ok(Status::Ok)
}
