//! Per-run manifests: every subcommand writes one beside its outputs,
//! recording the tool version, the full parameter set, input paths, and
//! seeds. Re-running the recorded subcommand with the recorded parameters
//! reproduces the outputs byte-identically.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub params: serde_json::Value,
    pub inputs: Vec<String>,
    pub seed: Option<u64>,
    pub config_hash: String,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        params: serde_json::Value,
        inputs: Vec<String>,
        seed: Option<u64>,
    ) -> Self {
        let config_hash = hash_value(&params);
        RunManifest {
            tool: "posbias".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            params,
            inputs,
            seed,
            config_hash,
        }
    }
}

/// sha256 over the canonical (sorted-key) JSON encoding.
pub fn hash_value(value: &serde_json::Value) -> String {
    let canonical = serde_json::to_string(value).unwrap_or_default();
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Manifest location: `<out>/manifest.json` when the output is a directory,
/// `<out>.manifest.json` beside a file output otherwise.
pub fn manifest_path_for(out: &Path) -> PathBuf {
    if out.is_dir() {
        out.join("manifest.json")
    } else {
        let name = out
            .file_name()
            .map(|n| format!("{}.manifest.json", n.to_string_lossy()))
            .unwrap_or_else(|| "manifest.json".to_string());
        out.with_file_name(name)
    }
}

pub fn write_manifest(manifest: &RunManifest, out: &Path) -> Result<PathBuf> {
    let path = manifest_path_for(out);
    let file = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(file, manifest)?;
    Ok(path)
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
