//! `audit`: answer-position matching and the relative-position histogram.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use posbias_core::audit::{audit_collection, histogram, AnswerMatch, PositionHistogram};

use crate::cli::{ensure_dir, params_json};
use crate::error::Result;
use crate::formats::{msmarco, qrels as qrels_fmt};
use crate::manifest::{write_manifest, RunManifest};

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct AuditArgs {
    /// Collection TSV.
    #[arg(long)]
    pub collection: PathBuf,

    /// Qrels file naming the relevant passages per query.
    #[arg(long)]
    pub qrels: PathBuf,

    /// Answers TSV.
    #[arg(long)]
    pub answers: PathBuf,

    /// Histogram bin count.
    #[arg(long, default_value_t = 20)]
    pub bins: usize,

    /// Output directory (matches.csv, histogram.csv, summary.json).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct AuditSummary {
    matches: usize,
    omitted_queries: usize,
    bins: usize,
    tv_from_uniform: f64,
}

pub fn run(args: &AuditArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let collection = msmarco::load_collection_tsv(&args.collection)?.collection;
    let qrels = qrels_fmt::load_qrels(&args.qrels)?;
    let answers = msmarco::load_answers_tsv(&args.answers)?;

    let outcome = audit_collection(&collection, &qrels, &answers)?;
    let hist = histogram(&outcome.matches, args.bins)?;

    write_matches_csv(&outcome.matches, &args.out.join("matches.csv"))?;
    write_histogram_csv(&hist, &args.out.join("histogram.csv"))?;

    let summary = AuditSummary {
        matches: outcome.matches.len(),
        omitted_queries: outcome.omitted_queries,
        bins: args.bins,
        tv_from_uniform: hist.tv_from_uniform(),
    };
    let summary_file = File::create(args.out.join("summary.json"))?;
    serde_json::to_writer_pretty(BufWriter::new(summary_file), &summary)?;

    let inputs = vec![
        args.collection.display().to_string(),
        args.qrels.display().to_string(),
        args.answers.display().to_string(),
    ];
    let manifest = RunManifest::new("audit", params_json(args), inputs, None);
    write_manifest(&manifest, &args.out)?;
    Ok(())
}

pub fn write_matches_csv(matches: &[AnswerMatch], path: &std::path::Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "qid,pid,start,len,relpos")?;
    for m in matches {
        writeln!(
            out,
            "{},{},{},{},{:.6}",
            m.query_id, m.passage_id, m.start, m.answer_len, m.relative_position
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_histogram_csv(hist: &PositionHistogram, path: &std::path::Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "bin_low,bin_high,count,fraction")?;
    let bins = hist.bin_count();
    let fractions = hist.normalized();
    for (i, (&count, fraction)) in hist.counts().iter().zip(fractions.iter()).enumerate() {
        writeln!(
            out,
            "{:.6},{:.6},{},{:.6}",
            i as f64 / bins as f64,
            (i + 1) as f64 / bins as f64,
            count,
            fraction
        )?;
    }
    out.flush()?;
    Ok(())
}
