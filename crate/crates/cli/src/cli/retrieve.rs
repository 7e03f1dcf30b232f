//! `retrieve`: first-stage BM25 candidates in TREC run format.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use posbias_core::kernel::RunEntry;
use posbias_core::metrics::RankedRun;
use posbias_core::retrieval::{bm25_search, build_index, Bm25Params};

use crate::cli::params_json;
use crate::error::Result;
use crate::formats::{msmarco, trecrun};
use crate::manifest::{write_manifest, RunManifest};

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct RetrieveArgs {
    /// Collection TSV to index.
    #[arg(long)]
    pub collection: PathBuf,

    /// Queries TSV.
    #[arg(long)]
    pub queries: PathBuf,

    /// Candidates per query.
    #[arg(long, default_value_t = 1000)]
    pub k: usize,

    #[arg(long, default_value_t = 0.9)]
    pub k1: f64,

    #[arg(long, default_value_t = 0.4)]
    pub b: f64,

    /// Run tag written into column six.
    #[arg(long, default_value = "bm25")]
    pub tag: String,

    /// Output run file.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &RetrieveArgs) -> Result<()> {
    let collection = msmarco::load_collection_tsv(&args.collection)?.collection;
    let queries = msmarco::load_queries_tsv(&args.queries)?.queries;
    let index = build_index(
        &collection,
        Bm25Params {
            k1: args.k1,
            b: args.b,
        },
    )?;

    let mut entries = Vec::new();
    for query in queries.iter() {
        let hits = bm25_search(&index, &query.tokens, args.k)?;
        for (rank, (pid, score)) in hits.into_iter().enumerate() {
            entries.push((
                query.id.clone(),
                RunEntry {
                    passage_id: pid,
                    rank: rank + 1,
                    score,
                },
            ));
        }
    }
    let run = RankedRun::from_entries(entries)?;
    trecrun::write_run(&run, &args.tag, &args.out)?;

    let inputs = vec![
        args.collection.display().to_string(),
        args.queries.display().to_string(),
    ];
    let manifest = RunManifest::new("retrieve", params_json(args), inputs, None);
    write_manifest(&manifest, &args.out)?;
    Ok(())
}
