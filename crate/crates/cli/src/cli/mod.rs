//! Command-line surface: one subcommand per pipeline stage.
//!
//! ingest -> audit -> debias -> retrieve -> encode -> probe -> rerank ->
//! eval -> report. Every subcommand writes a manifest beside its outputs
//! and never mutates its inputs. Exit codes: 0 success, 1 validation error,
//! 2 I/O or parse error, 64 usage.

use clap::{Parser, Subcommand};

use crate::error::Result;

pub mod audit;
pub mod debias;
pub mod encode;
pub mod eval;
pub mod ingest;
pub mod probe;
pub mod report;
pub mod rerank;
pub mod retrieve;

#[derive(Debug, Parser)]
#[command(
    name = "posbias",
    version,
    about = "Audit, debias, and evaluate positional bias in passage retrieval collections"
)]
pub struct Cli {
    /// Worker-thread cap for the encode/rerank heavy lifting. Results are
    /// identical for any value.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a collection (MS MARCO TSV, SQuAD JSON, or synthetic fixture)
    /// into canonical re-exports.
    Ingest(ingest::IngestArgs),
    /// Match answer strings into relevant passages and histogram the
    /// relative start positions.
    Audit(audit::AuditArgs),
    /// Rotate every passage at a seeded random index, uniformizing answer
    /// positions without touching judgments.
    Debias(debias::DebiasArgs),
    /// First-stage BM25 candidate generation.
    Retrieve(retrieve::RetrieveArgs),
    /// Contextualize a collection and dump per-term vectors.
    Encode(encode::EncodeArgs),
    /// Compute the ATS curve and MATS summary over a term-vector dump.
    Probe(probe::ProbeArgs),
    /// Re-rank first-stage candidates with the kernel scorer.
    Rerank(rerank::RerankArgs),
    /// Score runs against qrels (MRR/nDCG/Recall@k), optionally comparing
    /// two runs with deltas and paired significance.
    Eval(eval::EvalArgs),
    /// Collect audit/probe/eval artifacts into one plot-ready report
    /// directory.
    Report(report::ReportArgs),
}

pub fn run(cli: Cli) -> Result<()> {
    let threads = cli.threads;
    match cli.command {
        Command::Ingest(args) => ingest::run(&args),
        Command::Audit(args) => audit::run(&args),
        Command::Debias(args) => debias::run(&args),
        Command::Retrieve(args) => retrieve::run(&args),
        Command::Encode(args) => encode::run(&args, threads),
        Command::Probe(args) => probe::run(&args),
        Command::Rerank(args) => rerank::run(&args, threads),
        Command::Eval(args) => eval::run(&args),
        Command::Report(args) => report::run(&args),
    }
}

/// Create the output directory (and parents) if needed.
pub(crate) fn ensure_dir(path: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(path)?;
    Ok(())
}

/// Serialize a command's argument struct for its manifest.
pub(crate) fn params_json<T: serde::Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}
