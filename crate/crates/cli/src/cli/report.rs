//! `report`: collect the plot-ready artifacts of earlier stages into one
//! directory with stable names.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::cli::{ensure_dir, params_json};
use crate::error::{CliError, Result};
use crate::manifest::{write_manifest, RunManifest};

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct ReportArgs {
    /// An `audit` output directory (histogram.csv, matches.csv).
    #[arg(long)]
    pub audit_dir: Option<PathBuf>,

    /// A `probe` output directory (ats.csv, mats.json).
    #[arg(long)]
    pub probe_dir: Option<PathBuf>,

    /// An `eval` output directory (aggregate.csv, optionally compare.csv).
    #[arg(long)]
    pub eval_dir: Option<PathBuf>,

    /// Report directory.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &ReportArgs) -> Result<()> {
    if args.audit_dir.is_none() && args.probe_dir.is_none() && args.eval_dir.is_none() {
        return Err(CliError::validation(
            "nothing to report: pass at least one of --audit-dir, --probe-dir, --eval-dir",
        ));
    }
    ensure_dir(&args.out)?;
    let mut collected = Vec::new();
    let mut inputs = Vec::new();

    if let Some(dir) = &args.audit_dir {
        inputs.push(dir.display().to_string());
        copy_artifact(
            dir,
            "histogram.csv",
            &args.out,
            "answer_position_histogram.csv",
            &mut collected,
        )?;
        copy_artifact(dir, "matches.csv", &args.out, "answer_matches.csv", &mut collected)?;
    }
    if let Some(dir) = &args.probe_dir {
        inputs.push(dir.display().to_string());
        copy_artifact(dir, "ats.csv", &args.out, "ats_curve.csv", &mut collected)?;
        copy_artifact(dir, "mats.json", &args.out, "mats_summary.json", &mut collected)?;
    }
    if let Some(dir) = &args.eval_dir {
        inputs.push(dir.display().to_string());
        copy_artifact(dir, "aggregate.csv", &args.out, "metric_table.csv", &mut collected)?;
        // Present only for two-run evaluations.
        if dir.join("compare.csv").exists() {
            copy_artifact(dir, "compare.csv", &args.out, "metric_deltas.csv", &mut collected)?;
        }
    }

    let mut summary = BufWriter::new(File::create(args.out.join("summary.txt"))?);
    writeln!(summary, "report artifacts:")?;
    for name in &collected {
        writeln!(summary, "  {name}")?;
    }
    summary.flush()?;

    let manifest = RunManifest::new("report", params_json(args), inputs, None);
    write_manifest(&manifest, &args.out)?;
    Ok(())
}

fn copy_artifact(
    from_dir: &Path,
    from_name: &str,
    out_dir: &Path,
    out_name: &str,
    collected: &mut Vec<String>,
) -> Result<()> {
    let source = from_dir.join(from_name);
    if !source.exists() {
        return Err(CliError::validation(format!(
            "expected artifact {} not found",
            source.display()
        )));
    }
    std::fs::copy(&source, out_dir.join(out_name))?;
    collected.push(out_name.to_string());
    Ok(())
}
