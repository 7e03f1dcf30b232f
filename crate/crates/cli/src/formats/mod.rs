//! On-disk formats: corpus TSVs, qrels, SQuAD JSON, TREC runs, term-vector
//! dumps, embedding tables, encoder weight archives, and rotation maps.

pub mod dump;
pub mod embeddings;
pub mod msmarco;
pub mod qrels;
pub mod rotmap;
pub mod squad;
pub mod trecrun;
pub mod weights;
