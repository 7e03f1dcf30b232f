//! Rotation maps as TSV: `pid<TAB>r<TAB>n`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use posbias_core::debias::{Rotation, RotationMap};

use crate::error::{CliError, Result};

pub fn write_rotation_map(map: &RotationMap, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (pid, rotation) in map.iter() {
        writeln!(out, "{pid}\t{}\t{}", rotation.r, rotation.n)?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_rotation_map(path: &Path) -> Result<RotationMap> {
    let reader = BufReader::new(File::open(path)?);
    let mut map = RotationMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(CliError::parse_at(
                path,
                idx + 1,
                format!("expected 3 tab-separated columns, found {}", fields.len()),
            ));
        }
        let r: usize = fields[1].parse().map_err(|_| {
            CliError::parse_at(path, idx + 1, format!("r '{}' is not an integer", fields[1]))
        })?;
        let n: usize = fields[2].parse().map_err(|_| {
            CliError::parse_at(path, idx + 1, format!("n '{}' is not an integer", fields[2]))
        })?;
        if r < 1 || r > n {
            return Err(CliError::parse_at(
                path,
                idx + 1,
                format!("rotation {r} out of range 1..={n}"),
            ));
        }
        map.insert(fields[0], Rotation { r, n });
    }
    Ok(map)
}
