//! `debias`: rotate every passage at a seeded random index and write the
//! rotated collection plus its rotation map.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use posbias_core::debias::debias_collection;

use crate::cli::params_json;
use crate::error::Result;
use crate::formats::{msmarco, rotmap};
use crate::manifest::{write_manifest, RunManifest};

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct DebiasArgs {
    /// Collection TSV to debias.
    #[arg(long)]
    pub collection: PathBuf,

    /// Rotation seed; the same seed reproduces the output byte-for-byte.
    #[arg(long)]
    pub seed: u64,

    /// Debiased collection TSV.
    #[arg(long)]
    pub out: PathBuf,

    /// Rotation map TSV (`pid<TAB>r<TAB>n`).
    #[arg(long)]
    pub rotation_map: PathBuf,
}

pub fn run(args: &DebiasArgs) -> Result<()> {
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let collection = msmarco::load_collection_tsv(&args.collection)?.collection;
    let (debiased, rotations) = debias_collection(&collection, args.seed)?;
    msmarco::write_collection_tsv(&debiased, &args.out)?;
    rotmap::write_rotation_map(&rotations, &args.rotation_map)?;

    let inputs = vec![args.collection.display().to_string()];
    let manifest = RunManifest::new("debias", params_json(args), inputs, Some(args.seed));
    write_manifest(&manifest, &args.out)?;
    Ok(())
}
