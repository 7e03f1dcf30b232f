//! `encode`: contextualize a collection (or query set) and dump one vector
//! per term occurrence.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use posbias_core::encoder::{contextualize, EmbeddingTable, EncoderConfig, EncoderParams, Role};
use posbias_core::probe::VectorDumpRecord;

use crate::cli::params_json;
use crate::config::EncoderConfigFile;
use crate::error::{CliError, Result};
use crate::formats::{dump, embeddings, msmarco, weights};
use crate::manifest::{write_manifest, RunManifest};
use crate::parallel::parallel_map;

/// Embedding-table and encoder-weight selection shared by `encode` and
/// `rerank`.
#[derive(Debug, Args, Serialize, Deserialize)]
pub struct EncoderStackArgs {
    /// Pre-trained embeddings in whitespace text format.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,

    /// Random embedding table of this dimension over the corpus vocabulary;
    /// vectors are seeded per token, so shared tokens agree across runs.
    #[arg(long, conflicts_with = "embeddings")]
    pub random_embeddings: Option<usize>,

    /// Uniform range of random embedding components.
    #[arg(long, default_value_t = 1.0)]
    pub embedding_scale: f32,

    #[arg(long, default_value_t = 7)]
    pub embedding_seed: u64,

    /// Encoder architecture config (JSON); ignored fields fall back to the
    /// defaults.
    #[arg(long)]
    pub encoder_config: Option<PathBuf>,

    /// Weight archive manifest (carries its own architecture).
    #[arg(long, conflicts_with_all = ["init_seed", "encoder_config"])]
    pub weights: Option<PathBuf>,

    /// Seed for random weight initialization (used when no archive is
    /// given).
    #[arg(long)]
    pub init_seed: Option<u64>,

    /// Gate override: 1 = raw embeddings, 0 = pure contextualization.
    #[arg(long)]
    pub alpha: Option<f32>,
}

impl EncoderStackArgs {
    /// Resolve the embedding table and encoder parameters against the
    /// vocabulary of the sequences about to be encoded.
    pub fn build<'a>(
        &self,
        vocab: impl IntoIterator<Item = &'a str>,
        inputs: &mut Vec<String>,
    ) -> Result<(EmbeddingTable, EncoderParams)> {
        let table = match (&self.embeddings, self.random_embeddings) {
            (Some(path), None) => {
                inputs.push(path.display().to_string());
                embeddings::load_embeddings_text(path)?
            }
            (None, Some(dim)) => {
                EmbeddingTable::random(dim, vocab, self.embedding_seed, self.embedding_scale)?
            }
            (None, None) => {
                return Err(CliError::validation(
                    "pick an embedding source: --embeddings <file> or --random-embeddings <dim>",
                ));
            }
            (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
        };

        let mut params = match &self.weights {
            Some(path) => {
                inputs.push(path.display().to_string());
                weights::load_encoder(path)?
            }
            None => {
                let file = match &self.encoder_config {
                    Some(path) => {
                        inputs.push(path.display().to_string());
                        let reader = std::io::BufReader::new(std::fs::File::open(path)?);
                        serde_json::from_reader::<_, EncoderConfigFile>(reader)?
                    }
                    None => EncoderConfigFile {
                        emb_dim: None,
                        layers: None,
                        heads: None,
                        head_dim: None,
                        ff_dim: None,
                        alpha: None,
                        query_offset: None,
                        passage_offset: None,
                    },
                };
                let defaults = EncoderConfig::default();
                let config = EncoderConfig {
                    emb_dim: file.emb_dim.unwrap_or(table.dim()),
                    layers: file.layers.unwrap_or(defaults.layers),
                    heads: file.heads.unwrap_or(defaults.heads),
                    head_dim: file.head_dim.unwrap_or(defaults.head_dim),
                    ff_dim: file.ff_dim.unwrap_or(defaults.ff_dim),
                    alpha: file.alpha.unwrap_or(defaults.alpha),
                    query_offset: file.query_offset.unwrap_or(defaults.query_offset),
                    passage_offset: file.passage_offset.unwrap_or(defaults.passage_offset),
                };
                EncoderParams::random(config, self.init_seed.unwrap_or(0))?
            }
        };
        if let Some(alpha) = self.alpha {
            params.config.alpha = alpha;
        }
        params.config.validate()?;
        if params.config.emb_dim != table.dim() {
            return Err(CliError::validation(format!(
                "encoder expects {}-dim embeddings but the table provides {}",
                params.config.emb_dim,
                table.dim()
            )));
        }
        Ok((table, params))
    }
}

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct EncodeArgs {
    /// Collection TSV (role = passage).
    #[arg(long)]
    pub collection: Option<PathBuf>,

    /// Queries TSV (role = query).
    #[arg(long)]
    pub queries: Option<PathBuf>,

    /// Which positional offset to apply: 'passage' or 'query'.
    #[arg(long, default_value = "passage")]
    pub role: String,

    #[command(flatten)]
    pub stack: EncoderStackArgs,

    /// Persist the resolved encoder weights as an archive manifest.
    #[arg(long)]
    pub save_weights: Option<PathBuf>,

    /// Dump path: `.json` writes the binary variant, anything else the text
    /// layout.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &EncodeArgs, threads: usize) -> Result<()> {
    let role = parse_role(&args.role)?;
    let mut inputs = Vec::new();
    let items: Vec<(String, Vec<String>)> = match role {
        Role::Passage => {
            let path = args.collection.as_ref().ok_or_else(|| {
                CliError::validation("--role passage requires --collection")
            })?;
            inputs.push(path.display().to_string());
            msmarco::load_collection_tsv(path)?
                .collection
                .iter()
                .map(|p| (p.id.clone(), p.tokens.clone()))
                .collect()
        }
        Role::Query => {
            let path = args
                .queries
                .as_ref()
                .ok_or_else(|| CliError::validation("--role query requires --queries"))?;
            inputs.push(path.display().to_string());
            msmarco::load_queries_tsv(path)?
                .queries
                .iter()
                .map(|q| (q.id.clone(), q.tokens.clone()))
                .collect()
        }
    };

    let vocab: BTreeSet<&str> = items
        .iter()
        .flat_map(|(_, tokens)| tokens.iter().map(String::as_str))
        .collect();
    let (table, params) = args.stack.build(vocab, &mut inputs)?;

    let records = encode_to_records(&items, role, &table, &params, threads)?;
    if args.out.extension().is_some_and(|e| e == "json") {
        dump::write_dump_binary(&records, &args.out)?;
    } else {
        dump::write_dump_text(&records, &args.out)?;
    }
    if let Some(weights_path) = &args.save_weights {
        weights::save_encoder(&params, weights_path)?;
    }

    let manifest = RunManifest::new("encode", params_json(args), inputs, args.stack.init_seed);
    write_manifest(&manifest, &args.out)?;
    Ok(())
}

/// Contextualize every sequence and emit one record per term occurrence,
/// in sequence order regardless of thread count.
pub fn encode_to_records(
    items: &[(String, Vec<String>)],
    role: Role,
    table: &EmbeddingTable,
    params: &EncoderParams,
    threads: usize,
) -> Result<Vec<VectorDumpRecord>> {
    let encoded = parallel_map(items, threads, |(id, tokens)| {
        contextualize(tokens, role, table, params).map(|seq| {
            seq.tokens
                .into_iter()
                .zip(seq.positions)
                .zip(seq.vectors)
                .map(|((term, position), vector)| VectorDumpRecord {
                    term,
                    passage_id: id.clone(),
                    position,
                    vector,
                })
                .collect::<Vec<_>>()
        })
    });
    let mut records = Vec::new();
    for result in encoded {
        records.extend(result?);
    }
    Ok(records)
}

pub fn parse_role(role: &str) -> Result<Role> {
    match role {
        "passage" => Ok(Role::Passage),
        "query" => Ok(Role::Query),
        other => Err(CliError::validation(format!(
            "role must be 'passage' or 'query', got '{other}'"
        ))),
    }
}
