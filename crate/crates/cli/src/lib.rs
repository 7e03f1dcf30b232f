//! File formats, run manifests, synthetic fixtures, and the subcommand
//! pipelines behind the `posbias` binary.
//!
//! The algorithmic work lives in `posbias-core`; this crate owns everything
//! that touches the filesystem: TSV/JSON corpus loaders, TREC run files,
//! term-vector dumps, embedding tables, encoder weight archives, and the
//! per-run manifests that make every pipeline step reproducible from its
//! recorded inputs and seeds.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod parallel;
pub mod synthetic;

pub use error::{CliError, Result};
