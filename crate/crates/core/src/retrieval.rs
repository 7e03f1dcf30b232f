//! In-memory BM25 indexing and search for first-stage candidate generation.
//!
//! Desk-scale stand-in for an external first-stage engine: exact postings
//! over the tokenized collection, scored with the +0.5-smoothed
//! `ln(1 + (N - df + 0.5)/(df + 0.5))` idf variant. Because BM25 sees only
//! term frequencies and lengths, scores are invariant under passage
//! rotation, which keeps first-stage candidates stable across debiasing.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::Collection;
use crate::error::CoreError;
use crate::math;
use crate::Result;

/// BM25 parameters; defaults are the common passage-ranking tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 0.9, b: 0.4 }
    }
}

/// One postings entry: passage ordinal and term frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub ordinal: u32,
    pub tf: u32,
}

/// Exact in-memory inverted index over a collection.
#[derive(Debug, Clone)]
pub struct InvertedIndex {
    postings: BTreeMap<String, Vec<Posting>>,
    doc_lengths: Vec<u32>,
    ids: Vec<String>,
    avg_len: f64,
    params: Bm25Params,
}

impl InvertedIndex {
    pub fn doc_count(&self) -> usize {
        self.doc_lengths.len()
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avg_len
    }

    pub fn doc_length(&self, ordinal: usize) -> Option<u32> {
        self.doc_lengths.get(ordinal).copied()
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn postings(&self, term: &str) -> Option<&[Posting]> {
        self.postings.get(term).map(Vec::as_slice)
    }

    pub fn term_count(&self) -> usize {
        self.postings.len()
    }

    /// Total occurrences of a term across the collection.
    pub fn collection_frequency(&self, term: &str) -> u64 {
        self.postings(term)
            .map(|ps| ps.iter().map(|p| p.tf as u64).sum())
            .unwrap_or(0)
    }
}

/// Build the index; postings are sorted by ordinal because passages are
/// scanned in collection order.
pub fn build_index(collection: &Collection, params: Bm25Params) -> Result<InvertedIndex> {
    if collection.is_empty() {
        return Err(CoreError::invalid("cannot index an empty collection"));
    }
    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut doc_lengths = Vec::with_capacity(collection.len());
    let mut ids = Vec::with_capacity(collection.len());
    let mut total_len = 0u64;
    for (ordinal, passage) in collection.iter().enumerate() {
        let mut tf: BTreeMap<&str, u32> = BTreeMap::new();
        for token in &passage.tokens {
            *tf.entry(token.as_str()).or_insert(0) += 1;
        }
        for (term, count) in tf {
            postings.entry(term.into()).or_default().push(Posting {
                ordinal: ordinal as u32,
                tf: count,
            });
        }
        doc_lengths.push(passage.len() as u32);
        ids.push(passage.id.clone());
        total_len += passage.len() as u64;
    }
    let avg_len = total_len as f64 / collection.len() as f64;
    Ok(InvertedIndex {
        postings,
        doc_lengths,
        ids,
        avg_len,
        params,
    })
}

/// Top-k BM25 search. Query tokens are scored as a multiset (a repeated
/// token contributes once per occurrence). Ties are broken by ascending
/// passage id; an all-OOV query returns the empty list.
pub fn bm25_search(
    index: &InvertedIndex,
    query_tokens: &[String],
    k: usize,
) -> Result<Vec<(String, f64)>> {
    if k == 0 {
        return Err(CoreError::invalid("result depth k must be at least 1"));
    }
    let n = index.doc_count() as f64;
    let Bm25Params { k1, b } = index.params;
    let mut scores: BTreeMap<u32, f64> = BTreeMap::new();
    for token in query_tokens {
        let Some(postings) = index.postings(token) else {
            continue;
        };
        let df = postings.len() as f64;
        let idf = math::ln(1.0 + (n - df + 0.5) / (df + 0.5));
        for posting in postings {
            let tf = posting.tf as f64;
            let len = index.doc_lengths[posting.ordinal as usize] as f64;
            let norm = tf + k1 * (1.0 - b + b * len / index.avg_len);
            *scores.entry(posting.ordinal).or_insert(0.0) += idf * tf * (k1 + 1.0) / norm;
        }
    }
    let mut ranked: Vec<(String, f64)> = scores
        .into_iter()
        .map(|(ordinal, score)| (index.ids[ordinal as usize].clone(), score))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    ranked.truncate(k);
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Passage;
    use crate::debias::debias_collection;
    use alloc::string::ToString;
    use alloc::vec;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(|t| t.to_string()).collect()
    }

    fn three_docs() -> Collection {
        Collection::new(vec![
            Passage::new("d1", "the cat sat on the mat").unwrap(),
            Passage::new("d2", "the dog barked").unwrap(),
            Passage::new("d3", "cats and dogs").unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn shared_term_posting_has_two_entries() {
        let index = build_index(&three_docs(), Bm25Params::default()).unwrap();
        assert_eq!(index.postings("the").unwrap().len(), 2);
        assert_eq!(index.postings("cat").unwrap().len(), 1);
        assert!(index.postings("unseen").is_none());
    }

    #[test]
    fn doc_lengths_equal_token_counts() {
        let c = three_docs();
        let index = build_index(&c, Bm25Params::default()).unwrap();
        for (ordinal, p) in c.iter().enumerate() {
            assert_eq!(index.doc_length(ordinal), Some(p.len() as u32));
        }
        assert!((index.avg_doc_length() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn empty_collection_rejected() {
        let c = Collection::new(vec![]).unwrap();
        assert!(build_index(&c, Bm25Params::default()).is_err());
    }

    #[test]
    fn containing_doc_ranks_first() {
        let c = Collection::new(vec![
            Passage::new("a", "quantum physics lecture").unwrap(),
            Passage::new("b", "cooking with garlic").unwrap(),
        ])
        .unwrap();
        let index = build_index(&c, Bm25Params::default()).unwrap();
        let hits = bm25_search(&index, &toks("quantum"), 10).unwrap();
        assert_eq!(hits[0].0, "a");
        assert_eq!(hits.len(), 1);
    }

    #[test]
    fn all_oov_query_returns_empty() {
        let index = build_index(&three_docs(), Bm25Params::default()).unwrap();
        assert!(bm25_search(&index, &toks("zebra xylophone"), 5)
            .unwrap()
            .is_empty());
        assert!(bm25_search(&index, &toks("zebra"), 0).is_err());
    }

    #[test]
    fn scores_match_flat_hand_computation() {
        // Spreadsheet-style re-evaluation of the three-doc corpus for the
        // query "the cat" with k1 = 0.9, b = 0.4.
        let index = build_index(&three_docs(), Bm25Params::default()).unwrap();
        let hits = bm25_search(&index, &toks("the cat"), 10).unwrap();

        let n = 3.0f64;
        let avg = 4.0f64;
        let (k1, b) = (0.9f64, 0.4f64);
        let idf_the = libm::log(1.0 + (n - 2.0 + 0.5) / (2.0 + 0.5));
        let idf_cat = libm::log(1.0 + (n - 1.0 + 0.5) / (1.0 + 0.5));
        let tf_part = |tf: f64, len: f64| tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avg));
        let d1 = idf_the * tf_part(2.0, 6.0) + idf_cat * tf_part(1.0, 6.0);
        let d2 = idf_the * tf_part(1.0, 3.0);

        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].0, "d1");
        assert!((hits[0].1 - d1).abs() < 1e-6, "{} vs {d1}", hits[0].1);
        assert_eq!(hits[1].0, "d2");
        assert!((hits[1].1 - d2).abs() < 1e-6, "{} vs {d2}", hits[1].1);
    }

    #[test]
    fn scores_invariant_under_rotation() {
        let c = three_docs();
        let index = build_index(&c, Bm25Params::default()).unwrap();
        let (rotated, _) = debias_collection(&c, 11).unwrap();
        let rotated_index = build_index(&rotated, Bm25Params::default()).unwrap();
        for query in ["the cat", "dogs", "the dog barked", "mat cats"] {
            let a = bm25_search(&index, &toks(query), 10).unwrap();
            let b = bm25_search(&rotated_index, &toks(query), 10).unwrap();
            assert_eq!(a.len(), b.len());
            for ((pid_a, s_a), (pid_b, s_b)) in a.iter().zip(b.iter()) {
                assert_eq!(pid_a, pid_b);
                assert!((s_a - s_b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rebuilding_after_debias_preserves_collection_frequencies() {
        let c = three_docs();
        let index = build_index(&c, Bm25Params::default()).unwrap();
        let (rotated, _) = debias_collection(&c, 4).unwrap();
        let rotated_index = build_index(&rotated, Bm25Params::default()).unwrap();
        assert_eq!(index.term_count(), rotated_index.term_count());
        for term in ["the", "cat", "dogs", "mat", "barked"] {
            assert_eq!(
                index.collection_frequency(term),
                rotated_index.collection_frequency(term),
            );
        }
    }

    #[test]
    fn score_monotone_in_tf_at_fixed_length() {
        let c = Collection::new(vec![
            Passage::new("one", "term filler filler filler").unwrap(),
            Passage::new("two", "term term filler filler").unwrap(),
        ])
        .unwrap();
        let index = build_index(&c, Bm25Params::default()).unwrap();
        let hits = bm25_search(&index, &toks("term"), 10).unwrap();
        assert_eq!(hits[0].0, "two");
        assert!(hits[0].1 > hits[1].1);
        assert!(hits.iter().all(|(_, s)| *s >= 0.0));
    }

    #[test]
    fn ties_break_by_ascending_passage_id() {
        let c = Collection::new(vec![
            Passage::new("zz", "same words here").unwrap(),
            Passage::new("aa", "same words here").unwrap(),
        ])
        .unwrap();
        let index = build_index(&c, Bm25Params::default()).unwrap();
        let hits = bm25_search(&index, &toks("same"), 10).unwrap();
        assert_eq!(hits[0].0, "aa");
        assert_eq!(hits[1].0, "zz");
    }
}
