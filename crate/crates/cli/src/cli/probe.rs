//! `probe`: ATS curve and MATS summary over a term-vector dump.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use posbias_core::probe::{ats_report, build_term_index, AtsReport};

use crate::cli::{ensure_dir, params_json};
use crate::error::{CliError, Result};
use crate::formats::dump;
use crate::manifest::{write_manifest, RunManifest};

/// Smallest couple count a gap needs to anchor the default curve range.
const DEFAULT_MIN_COUPLES: usize = 1000;

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct ProbeArgs {
    /// Term-vector dump (text, or a `.json` binary manifest).
    #[arg(long)]
    pub dump: PathBuf,

    /// Largest gap on the curve; defaults to the largest gap with at least
    /// 1000 couples (falling back to the largest available gap).
    #[arg(long)]
    pub max_delta: Option<usize>,

    /// Couple cap per (term, gap) group before seeded sampling kicks in.
    #[arg(long, default_value_t = 10_000)]
    pub cap: usize,

    /// Minimum occurrences for a term to participate.
    #[arg(long, default_value_t = 2)]
    pub min_occurrences: usize,

    /// Couple-sampling seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Divide MATS by the number of gaps that actually contributed instead
    /// of the literal `max_delta - 1`.
    #[arg(long)]
    pub normalize_by_count: bool,

    /// Output directory (ats.csv, mats.json).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct MatsFile {
    mats: f64,
    stddev: f64,
    max_delta: usize,
    included: usize,
    missing: Vec<usize>,
    normalized_by_count: bool,
    ats0: f64,
    couple_cap: usize,
    seed: u64,
}

pub fn run(args: &ProbeArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let records = dump::read_dump(&args.dump)?;
    let index = build_term_index(&records, args.min_occurrences, args.cap, args.seed)?;
    let max_delta = match args.max_delta {
        Some(d) => d,
        None => index
            .default_max_delta(DEFAULT_MIN_COUPLES)
            .or_else(|| index.max_available_delta())
            .ok_or_else(|| {
                CliError::validation("dump yields no cross-passage couples; nothing to probe")
            })?,
    };
    let report = ats_report(&index, max_delta, args.normalize_by_count)?;

    write_ats_csv(&report, &args.out.join("ats.csv"))?;
    let ats0 = report
        .rows
        .first()
        .filter(|r| r.delta == 0)
        .map(|r| r.mean)
        .unwrap_or(f64::NAN);
    let mats_file = MatsFile {
        mats: report.summary.mats,
        stddev: report.summary.stddev,
        max_delta: report.summary.max_delta,
        included: report.summary.included,
        missing: report.summary.missing.clone(),
        normalized_by_count: report.summary.normalized_by_count,
        ats0,
        couple_cap: args.cap,
        seed: args.seed,
    };
    let file = File::create(args.out.join("mats.json"))?;
    serde_json::to_writer_pretty(BufWriter::new(file), &mats_file)?;

    let inputs = vec![args.dump.display().to_string()];
    let manifest = RunManifest::new("probe", params_json(args), inputs, Some(args.seed));
    write_manifest(&manifest, &args.out)?;
    Ok(())
}

pub fn write_ats_csv(report: &AtsReport, path: &std::path::Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "delta,mean,stddev,count")?;
    for row in &report.rows {
        writeln!(
            out,
            "{},{:.6},{:.6},{}",
            row.delta, row.mean, row.stddev, row.count
        )?;
    }
    out.flush()?;
    Ok(())
}
