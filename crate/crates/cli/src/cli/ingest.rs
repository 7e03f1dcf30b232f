//! `ingest`: load MS MARCO TSV / SQuAD JSON / synthetic fixtures and write
//! the canonical re-exports plus ingestion statistics.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use posbias_core::corpus::{AnswerSet, Collection, Qrels, QuerySet};

use crate::cli::{ensure_dir, params_json};
use crate::error::{CliError, Result};
use crate::formats::{msmarco, qrels as qrels_fmt, squad};
use crate::manifest::{write_manifest, RunManifest};
use crate::synthetic::{self, AnswerPosition, SyntheticSpec};

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct IngestArgs {
    /// MS MARCO-style collection TSV (`id<TAB>text`).
    #[arg(long, conflicts_with_all = ["squad", "synthetic"])]
    pub msmarco_collection: Option<PathBuf>,

    /// Queries TSV, evaluated against --msmarco-collection.
    #[arg(long, requires = "msmarco_collection")]
    pub queries: Option<PathBuf>,

    /// Qrels file (`qid 0 pid grade`).
    #[arg(long, requires = "msmarco_collection")]
    pub qrels: Option<PathBuf>,

    /// Answers TSV (`qid<TAB>answer text`).
    #[arg(long, requires = "msmarco_collection")]
    pub answers: Option<PathBuf>,

    /// SQuAD 2.0 JSON file.
    #[arg(long, conflicts_with = "synthetic")]
    pub squad: Option<PathBuf>,

    /// Generate a synthetic planted-answer fixture instead of reading files.
    #[arg(long)]
    pub synthetic: bool,

    /// Synthetic: number of queries (one relevant passage each).
    #[arg(long, default_value_t = 200)]
    pub passages: usize,

    /// Synthetic: tokens per passage.
    #[arg(long, default_value_t = 100)]
    pub passage_len: usize,

    /// Synthetic: filler vocabulary size.
    #[arg(long, default_value_t = 100)]
    pub vocab: usize,

    /// Synthetic: answer length in tokens.
    #[arg(long, default_value_t = 1)]
    pub answer_len: usize,

    /// Synthetic: relative answer start in [0,1), or 'uniform'.
    #[arg(long, default_value = "0.0")]
    pub answer_pos: String,

    /// Synthetic: confusable passages per query (same answer tokens at
    /// uniform positions, not judged relevant).
    #[arg(long, default_value_t = 0)]
    pub distractors: usize,

    /// Synthetic: generator seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Output directory for the canonical re-exports.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Default, Serialize)]
struct IngestStats {
    passages: usize,
    queries: usize,
    qrels_queries: usize,
    answer_queries: usize,
    skipped_empty_passages: usize,
    skipped_empty_queries: usize,
    dropped_impossible: usize,
}

pub fn run(args: &IngestArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let mut stats = IngestStats::default();
    let mut inputs = Vec::new();

    let (collection, queries, qrels, answers) = if args.synthetic {
        let spec = SyntheticSpec {
            queries: args.passages,
            passage_len: args.passage_len,
            vocab: args.vocab,
            answer_len: args.answer_len,
            answer_pos: args
                .answer_pos
                .parse::<AnswerPosition>()
                .map_err(CliError::Validation)?,
            distractors: args.distractors,
            seed: args.seed,
        };
        let fixture = synthetic::generate(&spec)?;
        (
            fixture.collection,
            Some(fixture.queries),
            Some(fixture.qrels),
            Some(fixture.answers),
        )
    } else if let Some(squad_path) = &args.squad {
        inputs.push(squad_path.display().to_string());
        let load = squad::load_squad(squad_path)?;
        stats.skipped_empty_passages = load.skipped_empty_passages;
        stats.skipped_empty_queries = load.skipped_empty_queries;
        stats.dropped_impossible = load.dropped_impossible;
        (
            load.collection,
            Some(load.queries),
            Some(load.qrels),
            Some(load.answers),
        )
    } else if let Some(collection_path) = &args.msmarco_collection {
        inputs.push(collection_path.display().to_string());
        let load = msmarco::load_collection_tsv(collection_path)?;
        stats.skipped_empty_passages = load.skipped_empty;
        let queries = args
            .queries
            .as_ref()
            .map(|p| {
                inputs.push(p.display().to_string());
                msmarco::load_queries_tsv(p)
            })
            .transpose()?
            .map(|q| {
                stats.skipped_empty_queries = q.skipped_empty;
                q.queries
            });
        let qrels = args
            .qrels
            .as_ref()
            .map(|p| {
                inputs.push(p.display().to_string());
                qrels_fmt::load_qrels(p)
            })
            .transpose()?;
        let answers = args
            .answers
            .as_ref()
            .map(|p| {
                inputs.push(p.display().to_string());
                msmarco::load_answers_tsv(p)
            })
            .transpose()?;
        (load.collection, queries, qrels, answers)
    } else {
        return Err(CliError::validation(
            "pick a source: --msmarco-collection, --squad, or --synthetic",
        ));
    };

    if let Some(qrels) = &qrels {
        qrels.validate_against(&collection)?;
    }

    write_exports(args, &collection, &queries, &qrels, &answers)?;

    stats.passages = collection.len();
    stats.queries = queries.as_ref().map(QuerySet::len).unwrap_or(0);
    stats.qrels_queries = qrels.as_ref().map(Qrels::len).unwrap_or(0);
    stats.answer_queries = answers.as_ref().map(AnswerSet::len).unwrap_or(0);
    let stats_file = std::fs::File::create(args.out.join("stats.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(stats_file), &stats)?;

    let seed = args.synthetic.then_some(args.seed);
    let manifest = RunManifest::new("ingest", params_json(args), inputs, seed);
    write_manifest(&manifest, &args.out)?;
    Ok(())
}

fn write_exports(
    args: &IngestArgs,
    collection: &Collection,
    queries: &Option<QuerySet>,
    qrels: &Option<Qrels>,
    answers: &Option<AnswerSet>,
) -> Result<()> {
    msmarco::write_collection_tsv(collection, &args.out.join("collection.tsv"))?;
    if let Some(queries) = queries {
        msmarco::write_queries_tsv(queries, &args.out.join("queries.tsv"))?;
    }
    if let Some(qrels) = qrels {
        qrels_fmt::write_qrels(qrels, &args.out.join("qrels.txt"))?;
    }
    if let Some(answers) = answers {
        msmarco::write_answers_tsv(answers, &args.out.join("answers.tsv"))?;
    }
    Ok(())
}
