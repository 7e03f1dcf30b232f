//! Term-vector dumps.
//!
//! Text layout: one record per line, `term<TAB>pid<TAB>pos<TAB>v1,v2,...,vd`
//! with shortest-round-trip decimal floats, so write/read is lossless at
//! 32-bit precision. The binary variant pairs a JSON manifest (dimension +
//! record identities + data file name) with a flat little-endian f32 file.
//! `read_dump` picks the variant from the extension (`.json` = binary
//! manifest).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use posbias_core::probe::VectorDumpRecord;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub fn write_dump_text(records: &[VectorDumpRecord], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let mut buf = String::new();
    for r in records {
        buf.clear();
        for (i, v) in r.vector.iter().enumerate() {
            if i > 0 {
                buf.push(',');
            }
            buf.push_str(&format!("{v}"));
        }
        writeln!(out, "{}\t{}\t{}\t{}", r.term, r.passage_id, r.position, buf)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_dump_text(path: &Path) -> Result<Vec<VectorDumpRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    let mut dim: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(CliError::parse_at(
                path,
                idx + 1,
                format!("expected 4 tab-separated columns, found {}", fields.len()),
            ));
        }
        let position: usize = fields[2].parse().map_err(|_| {
            CliError::parse_at(path, idx + 1, format!("position '{}' is not an integer", fields[2]))
        })?;
        let vector = fields[3]
            .split(',')
            .map(|v| {
                v.parse::<f32>().map_err(|_| {
                    CliError::parse_at(path, idx + 1, format!("component '{v}' is not a float"))
                })
            })
            .collect::<Result<Vec<f32>>>()?;
        match dim {
            None => dim = Some(vector.len()),
            Some(d) if d != vector.len() => {
                return Err(CliError::parse_at(
                    path,
                    idx + 1,
                    format!("vector has {} components, expected {d}", vector.len()),
                ));
            }
            _ => {}
        }
        records.push(VectorDumpRecord {
            term: fields[0].to_string(),
            passage_id: fields[1].to_string(),
            position,
            vector,
        });
    }
    Ok(records)
}

#[derive(Debug, Serialize, Deserialize)]
struct DumpManifest {
    dim: usize,
    data: String,
    records: Vec<DumpRecordMeta>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DumpRecordMeta {
    term: String,
    pid: String,
    pos: usize,
}

pub fn write_dump_binary(records: &[VectorDumpRecord], manifest_path: &Path) -> Result<()> {
    let dim = records.first().map(|r| r.vector.len()).unwrap_or(0);
    for r in records {
        if r.vector.len() != dim {
            return Err(CliError::validation(format!(
                "record for term '{}' has dimension {}, expected {dim}",
                r.term,
                r.vector.len()
            )));
        }
    }
    let data_name = manifest_path
        .file_stem()
        .map(|s| format!("{}.bin", s.to_string_lossy()))
        .unwrap_or_else(|| "dump.bin".to_string());
    let manifest = DumpManifest {
        dim,
        data: data_name.clone(),
        records: records
            .iter()
            .map(|r| DumpRecordMeta {
                term: r.term.clone(),
                pid: r.passage_id.clone(),
                pos: r.position,
            })
            .collect(),
    };
    let manifest_file = BufWriter::new(File::create(manifest_path)?);
    serde_json::to_writer(manifest_file, &manifest)?;

    let bin_path = manifest_path.with_file_name(&data_name);
    let mut bin = BufWriter::new(File::create(bin_path)?);
    for r in records {
        for v in &r.vector {
            bin.write_all(&v.to_le_bytes())?;
        }
    }
    bin.flush()?;
    Ok(())
}

pub fn read_dump_binary(manifest_path: &Path) -> Result<Vec<VectorDumpRecord>> {
    let manifest: DumpManifest = serde_json::from_reader(BufReader::new(File::open(manifest_path)?))?;
    let bin_path = manifest_path.with_file_name(&manifest.data);
    let mut bytes = Vec::new();
    File::open(&bin_path)?.read_to_end(&mut bytes)?;
    let expected = manifest.records.len() * manifest.dim * 4;
    if bytes.len() != expected {
        return Err(CliError::parse(format!(
            "{}: expected {expected} bytes of f32 data, found {}",
            bin_path.display(),
            bytes.len()
        )));
    }
    let mut records = Vec::with_capacity(manifest.records.len());
    for (i, meta) in manifest.records.into_iter().enumerate() {
        let base = i * manifest.dim * 4;
        let vector = (0..manifest.dim)
            .map(|c| {
                let at = base + c * 4;
                f32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
            })
            .collect();
        records.push(VectorDumpRecord {
            term: meta.term,
            passage_id: meta.pid,
            position: meta.pos,
            vector,
        });
    }
    Ok(records)
}

/// Autodetect the variant: `.json` manifests are binary dumps, anything
/// else is the text layout.
pub fn read_dump(path: &Path) -> Result<Vec<VectorDumpRecord>> {
    if path.extension().is_some_and(|e| e == "json") {
        read_dump_binary(path)
    } else {
        read_dump_text(path)
    }
}
