//! Six-column TREC run files: `qid Q0 pid rank score tag`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use posbias_core::kernel::RunEntry;
use posbias_core::metrics::RankedRun;

use crate::error::{CliError, Result};

pub fn load_run(path: &Path) -> Result<RankedRun> {
    let reader = BufReader::new(File::open(path)?);
    let mut entries: Vec<(String, RunEntry)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(CliError::parse_at(
                path,
                idx + 1,
                format!("expected 6 columns, found {}", fields.len()),
            ));
        }
        let rank: usize = fields[3].parse().map_err(|_| {
            CliError::parse_at(path, idx + 1, format!("rank '{}' is not an integer", fields[3]))
        })?;
        let score: f64 = fields[4].parse().map_err(|_| {
            CliError::parse_at(path, idx + 1, format!("score '{}' is not a number", fields[4]))
        })?;
        entries.push((
            fields[0].to_string(),
            RunEntry {
                passage_id: fields[2].to_string(),
                rank,
                score,
            },
        ));
    }
    Ok(RankedRun::from_entries(entries)?)
}

pub fn write_run(run: &RankedRun, tag: &str, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (qid, entries) in run.iter() {
        for entry in entries {
            writeln!(
                out,
                "{qid} Q0 {} {} {:.6} {tag}",
                entry.passage_id, entry.rank, entry.score
            )?;
        }
    }
    out.flush()?;
    Ok(())
}
