//! Pre-trained embedding tables in the common whitespace-separated text
//! format: `token v1 v2 ... vd`, one token per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use posbias_core::encoder::EmbeddingTable;

use crate::error::{CliError, Result};

pub fn load_embeddings_text(path: &Path) -> Result<EmbeddingTable> {
    let reader = BufReader::new(File::open(path)?);
    let mut table: Option<EmbeddingTable> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let token = fields.next().ok_or_else(|| {
            CliError::parse_at(path, idx + 1, "missing token column")
        })?;
        let vector = fields
            .map(|v| {
                v.parse::<f32>().map_err(|_| {
                    CliError::parse_at(path, idx + 1, format!("component '{v}' is not a float"))
                })
            })
            .collect::<Result<Vec<f32>>>()?;
        if vector.is_empty() {
            return Err(CliError::parse_at(path, idx + 1, "no vector components"));
        }
        let table = match &mut table {
            Some(t) => t,
            None => {
                table = Some(EmbeddingTable::new(vector.len())?);
                table.as_mut().unwrap()
            }
        };
        if vector.len() != table.dim() {
            return Err(CliError::parse_at(
                path,
                idx + 1,
                format!("vector has {} components, expected {}", vector.len(), table.dim()),
            ));
        }
        table.insert(token, vector)?;
    }
    table.ok_or_else(|| CliError::parse(format!("{}: no embeddings found", path.display())))
}

pub fn write_embeddings_text(table: &EmbeddingTable, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (token, vector) in table.iter() {
        write!(out, "{token}")?;
        for v in vector {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}
