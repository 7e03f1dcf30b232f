//! `eval`: score runs against qrels; with a second run, produce the
//! original-vs-debiased delta table with paired significance.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use posbias_core::corpus::Qrels;
use posbias_core::metrics::{compare_runs, mrr_at, ndcg_at, recall_at, RankedRun};
use posbias_core::stats::{wilcoxon_signed_rank, ZeroPolicy};

use crate::cli::{ensure_dir, params_json};
use crate::error::Result;
use crate::formats::{qrels as qrels_fmt, trecrun};
use crate::manifest::{write_manifest, RunManifest};

/// Significance level for the Wilcoxon marks in compare.csv.
const SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct EvalArgs {
    /// Run to evaluate.
    #[arg(long)]
    pub run: PathBuf,

    /// Second run for a side-by-side comparison (deltas + significance).
    #[arg(long)]
    pub run_b: Option<PathBuf>,

    /// Qrels file.
    #[arg(long)]
    pub qrels: PathBuf,

    /// Metric cutoff.
    #[arg(long, default_value_t = 10)]
    pub k: usize,

    /// Drop zero differences in the Wilcoxon test (default) or keep them in
    /// the ranking (Pratt).
    #[arg(long)]
    pub pratt: bool,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &EvalArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let run_a = trecrun::load_run(&args.run)?;
    let qrels = qrels_fmt::load_qrels(&args.qrels)?;
    let mut inputs = vec![
        args.run.display().to_string(),
        args.qrels.display().to_string(),
    ];

    evaluate_single(&run_a, &qrels, args.k, &args.out, "")?;

    if let Some(run_b_path) = &args.run_b {
        inputs.push(run_b_path.display().to_string());
        let run_b = trecrun::load_run(run_b_path)?;
        evaluate_single(&run_b, &qrels, args.k, &args.out, "_b")?;

        let comparison = compare_runs(&run_a, &run_b, &qrels, args.k)?;
        let policy = if args.pratt {
            ZeroPolicy::Pratt
        } else {
            ZeroPolicy::Drop
        };
        let mut out = BufWriter::new(File::create(args.out.join("compare.csv"))?);
        writeln!(out, "metric,orig,deb,delta_pct,p_value,significant")?;
        for row in &comparison.rows {
            let paired = &comparison.paired[&row.metric];
            let a: Vec<f64> = paired.iter().map(|&(x, _)| x).collect();
            let b: Vec<f64> = paired.iter().map(|&(_, y)| y).collect();
            let test = wilcoxon_signed_rank(&a, &b, policy)?;
            let delta = row
                .delta_pct
                .map(|d| format!("{d:.2}"))
                .unwrap_or_else(|| "undefined".to_string());
            let (p_text, significant) = match test.p_value {
                Some(p) => (format!("{p:.6}"), if p < SIGNIFICANCE_LEVEL { "yes" } else { "no" }),
                None => ("undefined".to_string(), "no"),
            };
            writeln!(
                out,
                "{},{:.6},{:.6},{delta},{p_text},{significant}",
                row.metric, row.mean_a, row.mean_b
            )?;
        }
        out.flush()?;
    }

    let manifest = RunManifest::new("eval", params_json(args), inputs, None);
    write_manifest(&manifest, &args.out)?;
    Ok(())
}

fn evaluate_single(
    run: &RankedRun,
    qrels: &Qrels,
    k: usize,
    out_dir: &Path,
    suffix: &str,
) -> Result<()> {
    let mrr = mrr_at(run, qrels, k)?;
    let ndcg = ndcg_at(run, qrels, k)?;
    let recall = recall_at(run, qrels, k)?;

    let mut per_query = BufWriter::new(File::create(
        out_dir.join(format!("per_query{suffix}.csv")),
    )?);
    writeln!(per_query, "qid,mrr,ndcg,recall")?;
    for (qid, mrr_value) in &mrr.per_query {
        writeln!(
            per_query,
            "{qid},{:.6},{:.6},{:.6}",
            mrr_value, ndcg.per_query[qid], recall.per_query[qid]
        )?;
    }
    per_query.flush()?;

    let mut aggregate = BufWriter::new(File::create(
        out_dir.join(format!("aggregate{suffix}.csv")),
    )?);
    writeln!(aggregate, "metric,mean,evaluated,excluded")?;
    for (name, report) in [("mrr", &mrr), ("ndcg", &ndcg), ("recall", &recall)] {
        writeln!(
            aggregate,
            "{name},{:.6},{},{}",
            report.mean,
            report.per_query.len(),
            report.excluded_queries
        )?;
    }
    aggregate.flush()?;
    Ok(())
}
