//! Canonical in-memory data model: passages, queries, relevance judgments
//! and answer strings, plus the deterministic tokenizer everything else is
//! defined against.
//!
//! Parsing of the on-disk formats (TSV collections, SQuAD JSON, qrels) lives
//! in the companion CLI crate; the constructors here enforce the structural
//! invariants (non-empty token lists, unique ids, dense ordinals) so that
//! downstream modules can rely on them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::Result;

/// Lowercased maximal runs of Unicode letters/digits, split on everything
/// else. Deterministic; empty input yields an empty list.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            // Lowercasing may expand to several chars, some of which are
            // combining marks; keep only the letters/digits so the output
            // re-tokenizes to itself.
            for lower in ch.to_lowercase() {
                if lower.is_alphanumeric() {
                    current.push(lower);
                }
            }
        } else if !current.is_empty() {
            tokens.push(core::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// A single passage: id, raw text, and its token sequence (always non-empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Passage {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
}

impl Passage {
    /// Tokenizes `text`; rejects passages that tokenize to nothing.
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Result<Self> {
        let id = id.into();
        let text = text.into();
        let tokens = tokenize(&text);
        if tokens.is_empty() {
            return Err(CoreError::validation(format!(
                "passage '{id}' has no tokens"
            )));
        }
        Ok(Passage { id, text, tokens })
    }

    /// Construct from an already tokenized sequence; text is the space-joined
    /// token list, so `tokens == tokenize(text)` holds by construction.
    pub fn from_tokens(id: impl Into<String>, tokens: Vec<String>) -> Result<Self> {
        let id = id.into();
        if tokens.is_empty() {
            return Err(CoreError::validation(format!(
                "passage '{id}' has no tokens"
            )));
        }
        let text = tokens.join(" ");
        Ok(Passage { id, text, tokens })
    }

    /// Token count n.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// A query with its token sequence (non-empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
}

impl Query {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Result<Self> {
        let id = id.into();
        let text = text.into();
        let tokens = tokenize(&text);
        if tokens.is_empty() {
            return Err(CoreError::validation(format!("query '{id}' has no tokens")));
        }
        Ok(Query { id, text, tokens })
    }
}

/// Ordered set of queries with id lookup.
#[derive(Debug, Clone, Default)]
pub struct QuerySet {
    queries: Vec<Query>,
    index: BTreeMap<String, usize>,
}

impl QuerySet {
    pub fn new(queries: Vec<Query>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (ord, q) in queries.iter().enumerate() {
            if index.insert(q.id.clone(), ord).is_some() {
                return Err(CoreError::validation(format!(
                    "duplicate query id '{}'",
                    q.id
                )));
            }
        }
        Ok(QuerySet { queries, index })
    }

    pub fn get(&self, id: &str) -> Option<&Query> {
        self.index.get(id).map(|&ord| &self.queries[ord])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Query> {
        self.queries.iter()
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }
}

/// Relevance judgments: query id -> (passage id -> grade). Grades are
/// non-negative; duplicate (qid, pid) entries keep the maximum grade.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a judgment, keeping the max grade on duplicates.
    pub fn insert(&mut self, qid: impl Into<String>, pid: impl Into<String>, grade: u32) {
        let entry = self
            .judgments
            .entry(qid.into())
            .or_default()
            .entry(pid.into())
            .or_insert(0);
        *entry = (*entry).max(grade);
    }

    /// All judged (pid, grade) pairs for a query.
    pub fn get(&self, qid: &str) -> Option<&BTreeMap<String, u32>> {
        self.judgments.get(qid)
    }

    /// Passage ids judged relevant (grade > 0) for a query.
    pub fn relevant(&self, qid: &str) -> impl Iterator<Item = (&str, u32)> {
        self.judgments
            .get(qid)
            .into_iter()
            .flat_map(|m| m.iter())
            .filter(|(_, &g)| g > 0)
            .map(|(pid, &g)| (pid.as_str(), g))
    }

    pub fn relevant_count(&self, qid: &str) -> usize {
        self.relevant(qid).count()
    }

    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeMap<String, u32>)> {
        self.judgments.iter().map(|(q, m)| (q.as_str(), m))
    }

    pub fn len(&self) -> usize {
        self.judgments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }

    /// Every judged passage id must resolve in the collection; offenders are
    /// listed in the error.
    pub fn validate_against(&self, collection: &Collection) -> Result<()> {
        let mut dangling: Vec<String> = Vec::new();
        for (qid, judged) in self.iter() {
            for pid in judged.keys() {
                if collection.get(pid).is_none() {
                    dangling.push(format!("{qid}:{pid}"));
                }
            }
        }
        if dangling.is_empty() {
            Ok(())
        } else {
            Err(CoreError::validation(format!(
                "{} qrels entries reference unknown passages: {}",
                dangling.len(),
                dangling.join(", ")
            )))
        }
    }
}

/// Answer strings per query (trimmed, non-empty).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnswerSet {
    answers: BTreeMap<String, Vec<String>>,
}

impl AnswerSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert an answer string; blank strings are ignored.
    pub fn insert(&mut self, qid: impl Into<String>, answer: impl Into<String>) {
        let answer = answer.into();
        let trimmed = answer.trim();
        if trimmed.is_empty() {
            return;
        }
        self.answers
            .entry(qid.into())
            .or_default()
            .push(trimmed.to_string());
    }

    pub fn get(&self, qid: &str) -> Option<&[String]> {
        self.answers.get(qid).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.answers.iter().map(|(q, a)| (q.as_str(), a.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }
}

/// Ordered passage collection with dense ordinals and id lookup.
#[derive(Debug, Clone, Default)]
pub struct Collection {
    passages: Vec<Passage>,
    index: BTreeMap<String, usize>,
}

impl Collection {
    pub fn new(passages: Vec<Passage>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (ord, p) in passages.iter().enumerate() {
            if index.insert(p.id.clone(), ord).is_some() {
                return Err(CoreError::validation(format!(
                    "duplicate passage id '{}'",
                    p.id
                )));
            }
        }
        Ok(Collection { passages, index })
    }

    pub fn get(&self, id: &str) -> Option<&Passage> {
        self.index.get(id).map(|&ord| &self.passages[ord])
    }

    /// Position of the passage in input order.
    pub fn ordinal(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn by_ordinal(&self, ord: usize) -> Option<&Passage> {
        self.passages.get(ord)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Passage> {
        self.passages.iter()
    }

    pub fn len(&self) -> usize {
        self.passages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.passages.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_splits_punctuation() {
        assert_eq!(tokenize("The cat, sat!"), ["the", "cat", "sat"]);
    }

    #[test]
    fn tokenize_empty_input() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn tokenize_mixed_alnum_golden() {
        // Golden case fixed by applying the letters/digits-run rule by hand.
        assert_eq!(tokenize("B-52's 2x"), ["b", "52", "s", "2x"]);
    }

    #[test]
    fn tokenize_idempotent_on_joined_output() {
        let text = "Fly Me to the Moon (1964), in B-flat.";
        let once = tokenize(text);
        let rejoined = once.join(" ");
        assert_eq!(tokenize(&rejoined), once);
    }

    #[test]
    fn passage_requires_tokens() {
        assert!(Passage::new("p1", "?!").is_err());
        assert!(Passage::new("p1", "one token").is_ok());
    }

    #[test]
    fn collection_rejects_duplicate_ids() {
        let p1 = Passage::new("p1", "alpha").unwrap();
        let p2 = Passage::new("p1", "beta").unwrap();
        assert!(Collection::new(vec![p1, p2]).is_err());
    }

    #[test]
    fn collection_lookup_roundtrips() {
        let passages = vec![
            Passage::new("a", "first passage").unwrap(),
            Passage::new("b", "second passage").unwrap(),
        ];
        let c = Collection::new(passages).unwrap();
        assert_eq!(c.ordinal("a"), Some(0));
        assert_eq!(c.ordinal("b"), Some(1));
        assert_eq!(c.get("b").unwrap().id, "b");
        assert_eq!(c.by_ordinal(1).unwrap().id, "b");
        assert!(c.get("missing").is_none());
    }

    #[test]
    fn qrels_keeps_max_grade() {
        let mut qrels = Qrels::new();
        qrels.insert("q1", "p9", 0);
        qrels.insert("q1", "p9", 1);
        qrels.insert("q1", "p9", 0);
        assert_eq!(qrels.get("q1").unwrap()["p9"], 1);
    }

    #[test]
    fn qrels_validation_lists_offenders() {
        let c = Collection::new(vec![Passage::new("p1", "text here").unwrap()]).unwrap();
        let mut qrels = Qrels::new();
        qrels.insert("q1", "p1", 1);
        assert!(qrels.validate_against(&c).is_ok());
        qrels.insert("q1", "ghost", 1);
        let err = qrels.validate_against(&c).unwrap_err();
        let msg = alloc::format!("{err}");
        assert!(msg.contains("q1:ghost"));
    }

    #[test]
    fn answers_trimmed_and_non_empty() {
        let mut answers = AnswerSet::new();
        answers.insert("q1", "  spaced out  ");
        answers.insert("q1", "   ");
        assert_eq!(answers.get("q1").unwrap(), ["spaced out"]);
    }
}
