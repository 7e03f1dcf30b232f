//! `rerank`: re-score first-stage candidates with the kernel scorer.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use posbias_core::kernel::{rerank, KernelConfig, ScoreWeights};
use posbias_core::metrics::RankedRun;

use crate::cli::encode::EncoderStackArgs;
use crate::cli::params_json;
use crate::config;
use crate::error::{CliError, Result};
use crate::formats::{msmarco, trecrun};
use crate::manifest::{write_manifest, RunManifest};
use crate::parallel::parallel_map;

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct RerankArgs {
    /// Collection TSV holding the candidate passages.
    #[arg(long)]
    pub collection: PathBuf,

    /// Queries TSV.
    #[arg(long)]
    pub queries: PathBuf,

    /// First-stage run to re-rank.
    #[arg(long)]
    pub run: PathBuf,

    /// Re-ranking depth: candidates below keep their first-stage order.
    #[arg(long, default_value_t = 100)]
    pub depth: usize,

    #[command(flatten)]
    pub stack: EncoderStackArgs,

    /// Kernel bank config (JSON); defaults to 11 kernels over [-1, 1] with
    /// width 0.1.
    #[arg(long)]
    pub kernel_config: Option<PathBuf>,

    /// Scoring weights (JSON `{"w": [...], "bias": ...}`); defaults to
    /// uniform 1/K.
    #[arg(long)]
    pub score_weights: Option<PathBuf>,

    #[arg(long, default_value = "tk")]
    pub tag: String,

    /// Output run file.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &RerankArgs, threads: usize) -> Result<()> {
    let mut inputs = vec![
        args.collection.display().to_string(),
        args.queries.display().to_string(),
        args.run.display().to_string(),
    ];
    let collection = msmarco::load_collection_tsv(&args.collection)?.collection;
    let queries = msmarco::load_queries_tsv(&args.queries)?.queries;
    let first_stage = trecrun::load_run(&args.run)?;

    let kernel_config = match &args.kernel_config {
        Some(path) => {
            inputs.push(path.display().to_string());
            config::load_kernel_config(path)?
        }
        None => KernelConfig::default(),
    };
    let weights = match &args.score_weights {
        Some(path) => {
            inputs.push(path.display().to_string());
            config::load_score_weights(path)?
        }
        None => ScoreWeights::uniform(kernel_config.kernel_count()),
    };
    weights.validate(kernel_config.kernel_count())?;

    let vocab: BTreeSet<&str> = collection
        .iter()
        .flat_map(|p| p.tokens.iter().map(String::as_str))
        .chain(queries.iter().flat_map(|q| q.tokens.iter().map(String::as_str)))
        .collect();
    let (table, params) = args.stack.build(vocab, &mut inputs)?;

    // One work item per run query, in run order.
    let work: Vec<(String, Vec<(String, f64)>)> = first_stage
        .iter()
        .map(|(qid, entries)| {
            (
                qid.to_string(),
                entries
                    .iter()
                    .map(|e| (e.passage_id.clone(), e.score))
                    .collect(),
            )
        })
        .collect();
    for (qid, _) in &work {
        if queries.get(qid).is_none() {
            return Err(CliError::validation(format!(
                "run query '{qid}' not present in the queries file"
            )));
        }
    }

    let rescored = parallel_map(&work, threads, |(qid, candidates)| {
        let query = queries.get(qid).expect("validated above");
        rerank(
            &query.tokens,
            candidates,
            &collection,
            &table,
            &params,
            &kernel_config,
            &weights,
            args.depth,
        )
    });

    let mut entries = Vec::new();
    for ((qid, _), result) in work.iter().zip(rescored) {
        for entry in result? {
            entries.push((qid.clone(), entry));
        }
    }
    let run = RankedRun::from_entries(entries)?;
    trecrun::write_run(&run, &args.tag, &args.out)?;

    let manifest = RunManifest::new("rerank", params_json(args), inputs, args.stack.init_seed);
    write_manifest(&manifest, &args.out)?;
    Ok(())
}
