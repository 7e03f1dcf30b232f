//! Qrels files: whitespace-separated `qid 0 pid grade` rows. Duplicate
//! (qid, pid) rows keep the maximum grade.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use posbias_core::corpus::Qrels;

use crate::error::{CliError, Result};

pub fn load_qrels(path: &Path) -> Result<Qrels> {
    let reader = BufReader::new(File::open(path)?);
    let mut qrels = Qrels::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(CliError::parse_at(
                path,
                idx + 1,
                format!("expected 4 columns, found {}", fields.len()),
            ));
        }
        let grade: u32 = fields[3].parse().map_err(|_| {
            CliError::parse_at(path, idx + 1, format!("grade '{}' is not an integer", fields[3]))
        })?;
        qrels.insert(fields[0], fields[2], grade);
    }
    Ok(qrels)
}

pub fn write_qrels(qrels: &Qrels, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (qid, judged) in qrels.iter() {
        for (pid, grade) in judged {
            writeln!(out, "{qid} 0 {pid} {grade}")?;
        }
    }
    out.flush()?;
    Ok(())
}
