//! Synthetic fixture corpora with planted answers.
//!
//! Each query gets one relevant passage with its (unique) answer tokens
//! planted at a configurable relative position, plus optional distractor
//! passages that contain the same answer tokens at uniformly random
//! positions but are not judged relevant. Planting the relevant answers at
//! a fixed early position while distractors scatter reproduces a
//! position-biased collection in miniature; the uniform mode produces an
//! unbiased control.

use posbias_core::corpus::{AnswerSet, Collection, Passage, Qrels, Query, QuerySet};
use posbias_core::rng::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Where the relevant passage's answer starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AnswerPosition {
    /// Relative position in [0, 1): start = floor(rel * (n - len + 1)) + 1.
    Fixed(f64),
    /// Uniform over all valid starts.
    Uniform,
}

impl std::str::FromStr for AnswerPosition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("uniform") {
            return Ok(AnswerPosition::Uniform);
        }
        let rel: f64 = s
            .parse()
            .map_err(|_| format!("'{s}' is neither a relative position nor 'uniform'"))?;
        if !(0.0..1.0).contains(&rel) {
            return Err(format!("relative position {rel} outside [0, 1)"));
        }
        Ok(AnswerPosition::Fixed(rel))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    /// Number of queries; each gets exactly one relevant passage.
    pub queries: usize,
    pub passage_len: usize,
    /// Filler vocabulary size.
    pub vocab: usize,
    pub answer_len: usize,
    pub answer_pos: AnswerPosition,
    /// Confusable passages per query: same answer tokens, uniform position,
    /// not relevant.
    pub distractors: usize,
    pub seed: u64,
}

pub struct SyntheticFixture {
    pub collection: Collection,
    pub queries: QuerySet,
    pub qrels: Qrels,
    pub answers: AnswerSet,
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticFixture> {
    if spec.queries == 0 || spec.passage_len == 0 || spec.vocab == 0 {
        return Err(CliError::validation(
            "queries, passage length, and vocabulary size must be positive",
        ));
    }
    if spec.answer_len == 0 || spec.answer_len > spec.passage_len {
        return Err(CliError::validation(format!(
            "answer length {} must lie in 1..={}",
            spec.answer_len, spec.passage_len
        )));
    }
    let mut rng = SplitMix64::new(spec.seed);
    let filler: Vec<String> = (0..spec.vocab).map(|i| format!("w{i}")).collect();

    let mut passages = Vec::new();
    let mut queries = Vec::new();
    let mut qrels = Qrels::new();
    let mut answers = AnswerSet::new();

    let valid_starts = spec.passage_len - spec.answer_len + 1;
    for q in 0..spec.queries {
        let answer_tokens: Vec<String> =
            (0..spec.answer_len).map(|t| format!("ans{q}x{t}")).collect();
        let answer_text = answer_tokens.join(" ");
        let qid = format!("q{q}");
        queries.push(Query::new(qid.clone(), answer_text.clone())?);
        answers.insert(qid.clone(), answer_text);

        let start = match spec.answer_pos {
            AnswerPosition::Fixed(rel) => ((rel * valid_starts as f64) as usize).min(valid_starts - 1) + 1,
            AnswerPosition::Uniform => rng.next_below(valid_starts as u64) as usize + 1,
        };
        let pid = format!("p{q}");
        passages.push(planted_passage(
            &pid,
            spec.passage_len,
            &answer_tokens,
            start,
            &filler,
            &mut rng,
        )?);
        qrels.insert(qid, pid, 1);

        for d in 0..spec.distractors {
            let start = rng.next_below(valid_starts as u64) as usize + 1;
            passages.push(planted_passage(
                &format!("p{q}d{d}"),
                spec.passage_len,
                &answer_tokens,
                start,
                &filler,
                &mut rng,
            )?);
        }
    }

    Ok(SyntheticFixture {
        collection: Collection::new(passages)?,
        queries: QuerySet::new(queries)?,
        qrels,
        answers,
    })
}

fn planted_passage(
    pid: &str,
    len: usize,
    answer_tokens: &[String],
    start: usize,
    filler: &[String],
    rng: &mut SplitMix64,
) -> Result<Passage> {
    let mut tokens: Vec<String> = (0..len)
        .map(|_| filler[rng.next_below(filler.len() as u64) as usize].clone())
        .collect();
    for (offset, answer_token) in answer_tokens.iter().enumerate() {
        tokens[start - 1 + offset] = answer_token.clone();
    }
    Ok(Passage::from_tokens(pid, tokens)?)
}
