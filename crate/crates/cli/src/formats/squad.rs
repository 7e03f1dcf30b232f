//! SQuAD 2.0 JSON ingestion.
//!
//! Unique paragraph contexts become passages with synthetic ids
//! `squad-p<k>` in first-occurrence order; every answerable question turns
//! into a query judged relevant (grade 1) to its context's passage, with its
//! answer texts collected. Unanswerable questions are dropped and counted.

use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use posbias_core::corpus::{AnswerSet, Collection, Passage, Qrels, Query, QuerySet};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
struct SquadFile {
    data: Vec<SquadArticle>,
}

#[derive(Debug, Deserialize)]
struct SquadArticle {
    paragraphs: Vec<SquadParagraph>,
}

#[derive(Debug, Deserialize)]
struct SquadParagraph {
    context: String,
    qas: Vec<SquadQa>,
}

#[derive(Debug, Deserialize)]
struct SquadQa {
    id: String,
    question: String,
    #[serde(default)]
    answers: Vec<SquadAnswer>,
    #[serde(default)]
    is_impossible: bool,
}

#[derive(Debug, Deserialize)]
struct SquadAnswer {
    text: String,
}

#[derive(Debug)]
pub struct SquadLoad {
    pub collection: Collection,
    pub queries: QuerySet,
    pub qrels: Qrels,
    pub answers: AnswerSet,
    pub dropped_impossible: usize,
    pub skipped_empty_passages: usize,
    pub skipped_empty_queries: usize,
}

pub fn load_squad(path: &Path) -> Result<SquadLoad> {
    let reader = BufReader::new(File::open(path)?);
    let mut deserializer = serde_json::Deserializer::from_reader(reader);
    let parsed: SquadFile = serde_path_to_error::deserialize(&mut deserializer).map_err(|e| {
        CliError::parse(format!(
            "{}: at {}: {}",
            path.display(),
            e.path(),
            e.inner()
        ))
    })?;

    let mut passages: Vec<Passage> = Vec::new();
    let mut context_to_pid: HashMap<String, Option<String>> = HashMap::new();
    let mut queries = Vec::new();
    let mut qrels = Qrels::new();
    let mut answers = AnswerSet::new();
    let mut dropped_impossible = 0;
    let mut skipped_empty_passages = 0;
    let mut skipped_empty_queries = 0;

    for article in &parsed.data {
        for paragraph in &article.paragraphs {
            let pid = match context_to_pid.get(&paragraph.context) {
                Some(entry) => entry.clone(),
                None => {
                    let candidate = format!("squad-p{}", passages.len());
                    let entry = match Passage::new(candidate, paragraph.context.clone()) {
                        Ok(p) => {
                            let id = p.id.clone();
                            passages.push(p);
                            Some(id)
                        }
                        Err(_) => {
                            skipped_empty_passages += 1;
                            None
                        }
                    };
                    context_to_pid.insert(paragraph.context.clone(), entry.clone());
                    entry
                }
            };
            for qa in &paragraph.qas {
                if qa.is_impossible {
                    dropped_impossible += 1;
                    continue;
                }
                let Some(pid) = &pid else {
                    skipped_empty_queries += 1;
                    continue;
                };
                match Query::new(qa.id.clone(), qa.question.clone()) {
                    Ok(q) => queries.push(q),
                    Err(_) => {
                        skipped_empty_queries += 1;
                        continue;
                    }
                }
                qrels.insert(qa.id.clone(), pid.clone(), 1);
                for answer in &qa.answers {
                    answers.insert(qa.id.clone(), answer.text.clone());
                }
            }
        }
    }

    Ok(SquadLoad {
        collection: Collection::new(passages)?,
        queries: QuerySet::new(queries)?,
        qrels,
        answers,
        dropped_impossible,
        skipped_empty_passages,
        skipped_empty_queries,
    })
}
