//! MS MARCO-style TSV loaders and writers: `id<TAB>text` lines, UTF-8, no
//! header. Rows that tokenize to nothing are skipped and counted rather
//! than rejected.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use posbias_core::corpus::{AnswerSet, Collection, Passage, Query, QuerySet};

use crate::error::{CliError, Result};

#[derive(Debug)]
pub struct CollectionLoad {
    pub collection: Collection,
    pub skipped_empty: usize,
}

pub fn load_collection_tsv(path: &Path) -> Result<CollectionLoad> {
    let mut passages = Vec::new();
    let mut skipped_empty = 0;
    for_each_tsv_row(path, |line_no, id, text| {
        match Passage::new(id, text) {
            Ok(p) => passages.push(p),
            Err(_) => skipped_empty += 1,
        }
        let _ = line_no;
        Ok(())
    })?;
    let collection = Collection::new(passages)?;
    Ok(CollectionLoad {
        collection,
        skipped_empty,
    })
}

/// Canonical re-export, identical in format to the input.
pub fn write_collection_tsv(collection: &Collection, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for passage in collection.iter() {
        writeln!(out, "{}\t{}", passage.id, passage.text)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug)]
pub struct QueryLoad {
    pub queries: QuerySet,
    pub skipped_empty: usize,
}

pub fn load_queries_tsv(path: &Path) -> Result<QueryLoad> {
    let mut queries = Vec::new();
    let mut skipped_empty = 0;
    for_each_tsv_row(path, |_, id, text| {
        match Query::new(id, text) {
            Ok(q) => queries.push(q),
            Err(_) => skipped_empty += 1,
        }
        Ok(())
    })?;
    let queries = QuerySet::new(queries)?;
    Ok(QueryLoad {
        queries,
        skipped_empty,
    })
}

pub fn write_queries_tsv(queries: &QuerySet, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for q in queries.iter() {
        writeln!(out, "{}\t{}", q.id, q.text)?;
    }
    out.flush()?;
    Ok(())
}

/// Answers use the same `id<TAB>text` rows; several rows per query id
/// accumulate into its answer list.
pub fn load_answers_tsv(path: &Path) -> Result<AnswerSet> {
    let mut answers = AnswerSet::new();
    for_each_tsv_row(path, |_, id, text| {
        answers.insert(id, text);
        Ok(())
    })?;
    Ok(answers)
}

pub fn write_answers_tsv(answers: &AnswerSet, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (qid, texts) in answers.iter() {
        for text in texts {
            writeln!(out, "{qid}\t{text}")?;
        }
    }
    out.flush()?;
    Ok(())
}

fn for_each_tsv_row(
    path: &Path,
    mut row: impl FnMut(usize, &str, &str) -> Result<()>,
) -> Result<()> {
    let reader = BufReader::new(File::open(path)?);
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(CliError::parse_at(
                path,
                idx + 1,
                format!("expected 2 tab-separated columns, found {}", fields.len()),
            ));
        }
        row(idx + 1, fields[0], fields[1])?;
    }
    Ok(())
}
