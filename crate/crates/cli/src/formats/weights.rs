//! Encoder weight archives: a JSON manifest naming tensor shapes plus a flat
//! little-endian f32 data file, in a fixed tensor order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use posbias_core::encoder::{EncoderLayer, EncoderParams, LayerNorm, Linear};
use serde::{Deserialize, Serialize};

use crate::config::EncoderConfigFile;
use crate::error::{CliError, Result};

#[derive(Debug, Serialize, Deserialize)]
struct WeightsManifest {
    config: EncoderConfigFile,
    data: String,
    tensors: Vec<TensorMeta>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TensorMeta {
    name: String,
    shape: Vec<usize>,
}

fn push_linear(tensors: &mut Vec<(String, Vec<usize>, Vec<f32>)>, name: &str, lin: &Linear) {
    tensors.push((
        format!("{name}.weight"),
        vec![lin.rows, lin.cols],
        lin.weight.clone(),
    ));
    tensors.push((format!("{name}.bias"), vec![lin.rows], lin.bias.clone()));
}

fn named_tensors(params: &EncoderParams) -> Vec<(String, Vec<usize>, Vec<f32>)> {
    let mut tensors = Vec::new();
    push_linear(&mut tensors, "in_proj", &params.in_proj);
    for (i, layer) in params.layers.iter().enumerate() {
        push_linear(&mut tensors, &format!("layers.{i}.w_q"), &layer.w_q);
        push_linear(&mut tensors, &format!("layers.{i}.w_k"), &layer.w_k);
        push_linear(&mut tensors, &format!("layers.{i}.w_v"), &layer.w_v);
        push_linear(&mut tensors, &format!("layers.{i}.w_o"), &layer.w_o);
        tensors.push((
            format!("layers.{i}.ln_attn.gamma"),
            vec![layer.ln_attn.gamma.len()],
            layer.ln_attn.gamma.clone(),
        ));
        tensors.push((
            format!("layers.{i}.ln_attn.beta"),
            vec![layer.ln_attn.beta.len()],
            layer.ln_attn.beta.clone(),
        ));
        push_linear(&mut tensors, &format!("layers.{i}.ff1"), &layer.ff1);
        push_linear(&mut tensors, &format!("layers.{i}.ff2"), &layer.ff2);
        tensors.push((
            format!("layers.{i}.ln_ff.gamma"),
            vec![layer.ln_ff.gamma.len()],
            layer.ln_ff.gamma.clone(),
        ));
        tensors.push((
            format!("layers.{i}.ln_ff.beta"),
            vec![layer.ln_ff.beta.len()],
            layer.ln_ff.beta.clone(),
        ));
    }
    push_linear(&mut tensors, "out_proj", &params.out_proj);
    tensors
}

pub fn save_encoder(params: &EncoderParams, manifest_path: &Path) -> Result<()> {
    let tensors = named_tensors(params);
    let data_name = manifest_path
        .file_stem()
        .map(|s| format!("{}.bin", s.to_string_lossy()))
        .unwrap_or_else(|| "weights.bin".to_string());
    let manifest = WeightsManifest {
        config: EncoderConfigFile::from_config(&params.config),
        data: data_name.clone(),
        tensors: tensors
            .iter()
            .map(|(name, shape, _)| TensorMeta {
                name: name.clone(),
                shape: shape.clone(),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(BufWriter::new(File::create(manifest_path)?), &manifest)?;
    let mut bin = BufWriter::new(File::create(manifest_path.with_file_name(&data_name))?);
    for (_, _, values) in &tensors {
        for v in values {
            bin.write_all(&v.to_le_bytes())?;
        }
    }
    bin.flush()?;
    Ok(())
}

pub fn load_encoder(manifest_path: &Path) -> Result<EncoderParams> {
    let manifest: WeightsManifest =
        serde_json::from_reader(BufReader::new(File::open(manifest_path)?))?;
    let config = manifest.config.to_config()?;
    config.validate()?;

    let bin_path = manifest_path.with_file_name(&manifest.data);
    let mut bytes = Vec::new();
    File::open(&bin_path)?.read_to_end(&mut bytes)?;
    let total: usize = manifest
        .tensors
        .iter()
        .map(|t| t.shape.iter().product::<usize>())
        .sum();
    if bytes.len() != total * 4 {
        return Err(CliError::parse(format!(
            "{}: expected {} bytes of f32 data, found {}",
            bin_path.display(),
            total * 4,
            bytes.len()
        )));
    }

    let mut reader = TensorReader {
        metas: manifest.tensors.iter(),
        bytes: &bytes,
        offset: 0,
    };
    let d_model = config.model_dim();
    let emb = config.emb_dim;

    let in_proj = reader.linear("in_proj", d_model, emb)?;
    let mut layers = Vec::with_capacity(config.layers);
    for i in 0..config.layers {
        layers.push(EncoderLayer {
            w_q: reader.linear(&format!("layers.{i}.w_q"), d_model, d_model)?,
            w_k: reader.linear(&format!("layers.{i}.w_k"), d_model, d_model)?,
            w_v: reader.linear(&format!("layers.{i}.w_v"), d_model, d_model)?,
            w_o: reader.linear(&format!("layers.{i}.w_o"), d_model, d_model)?,
            ln_attn: LayerNorm {
                gamma: reader.take(&format!("layers.{i}.ln_attn.gamma"), &[d_model])?,
                beta: reader.take(&format!("layers.{i}.ln_attn.beta"), &[d_model])?,
            },
            ff1: reader.linear(&format!("layers.{i}.ff1"), config.ff_dim, d_model)?,
            ff2: reader.linear(&format!("layers.{i}.ff2"), d_model, config.ff_dim)?,
            ln_ff: LayerNorm {
                gamma: reader.take(&format!("layers.{i}.ln_ff.gamma"), &[d_model])?,
                beta: reader.take(&format!("layers.{i}.ln_ff.beta"), &[d_model])?,
            },
        });
    }
    let out_proj = reader.linear("out_proj", emb, d_model)?;

    Ok(EncoderParams {
        config,
        in_proj,
        out_proj,
        layers,
    })
}

struct TensorReader<'a> {
    metas: std::slice::Iter<'a, TensorMeta>,
    bytes: &'a [u8],
    offset: usize,
}

impl TensorReader<'_> {
    fn take(&mut self, name: &str, expected_shape: &[usize]) -> Result<Vec<f32>> {
        let meta = self.metas.next().ok_or_else(|| {
            CliError::parse(format!("weights manifest ended before tensor '{name}'"))
        })?;
        if meta.name != name {
            return Err(CliError::parse(format!(
                "unexpected tensor '{}' (wanted '{name}'); archives use a fixed tensor order",
                meta.name
            )));
        }
        if meta.shape != expected_shape {
            return Err(CliError::parse(format!(
                "tensor '{name}' has shape {:?}, expected {expected_shape:?}",
                meta.shape
            )));
        }
        let count: usize = expected_shape.iter().product();
        let values: Vec<f32> = (0..count)
            .map(|i| {
                let at = (self.offset + i) * 4;
                f32::from_le_bytes([
                    self.bytes[at],
                    self.bytes[at + 1],
                    self.bytes[at + 2],
                    self.bytes[at + 3],
                ])
            })
            .collect();
        self.offset += count;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::validation(format!(
                "tensor '{name}' contains non-finite values"
            )));
        }
        Ok(values)
    }

    fn linear(&mut self, name: &str, rows: usize, cols: usize) -> Result<Linear> {
        let weight = self.take(&format!("{name}.weight"), &[rows, cols])?;
        let bias = self.take(&format!("{name}.bias"), &[rows])?;
        Ok(Linear::new(rows, cols, weight, bias)?)
    }
}
