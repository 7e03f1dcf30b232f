//! Core primitives for measuring and mitigating positional bias in passage
//! retrieval collections.
//!
//! The crate is organised around the stages of a bias study:
//!
//! - [`corpus`]: the canonical in-memory data model (passages, queries,
//!   relevance judgments, answer strings) and the deterministic tokenizer.
//! - [`audit`]: matching answer strings into relevant passages and binning
//!   the relative start positions into histograms.
//! - [`debias`]: the rotation transform that moves answer positions to a
//!   uniform distribution without touching judgments.
//! - [`encoder`]: a forward-only gated Transformer encoder over word
//!   embeddings with sinusoidal positional encodings, used to produce
//!   contextualized term vectors.
//! - [`kernel`]: cosine match-matrix scoring with RBF kernel pooling, and
//!   candidate re-ranking on top of it.
//! - [`probe`]: average term similarity (ATS) curves and the MATS summary
//!   over term-vector dumps, quantifying how much position information the
//!   encoder leaks into its vectors.
//! - [`retrieval`]: an in-memory BM25 index for first-stage candidates.
//! - [`metrics`] and [`stats`]: rank metrics (MRR/nDCG/Recall at cutoff),
//!   run comparison, and the paired Wilcoxon signed-rank test.
//!
//! Everything here is pure computation over in-memory data; file formats and
//! the command-line pipeline live in the companion `posbias-cli` crate. The
//! crate is `no_std` (with `alloc`) so the primitives stay free of incidental
//! platform dependencies.
//!
//! ```rust
//! use posbias_core::corpus::tokenize;
//! use posbias_core::debias::{map_position, rotate};
//!
//! let tokens = tokenize("The answer, hidden at the START of the passage.");
//! let rotated = rotate(&tokens, 4).unwrap();
//! assert_eq!(rotated.len(), tokens.len());
//! // The token originally at position 2 is found where the map predicts.
//! let moved = map_position(2, 4, tokens.len()).unwrap();
//! assert_eq!(rotated[moved - 1], tokens[1]);
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod audit;
pub mod corpus;
pub mod debias;
pub mod encoder;
pub mod error;
pub mod kernel;
pub mod metrics;
pub mod probe;
pub mod retrieval;
pub mod rng;
pub mod similarity;
pub mod stats;

mod math;

pub use error::CoreError;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, CoreError>;
