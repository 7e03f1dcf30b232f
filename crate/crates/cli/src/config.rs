//! JSON key-value config files for the encoder, the kernel bank, and the
//! scoring weights. Every field is optional and falls back to the built-in
//! default, so a config file only needs to state what it changes.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use posbias_core::encoder::EncoderConfig;
use posbias_core::kernel::{KernelConfig, ScoreWeights};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncoderConfigFile {
    pub emb_dim: Option<usize>,
    pub layers: Option<usize>,
    pub heads: Option<usize>,
    pub head_dim: Option<usize>,
    pub ff_dim: Option<usize>,
    pub alpha: Option<f32>,
    pub query_offset: Option<usize>,
    pub passage_offset: Option<usize>,
}

impl EncoderConfigFile {
    pub fn from_config(config: &EncoderConfig) -> Self {
        EncoderConfigFile {
            emb_dim: Some(config.emb_dim),
            layers: Some(config.layers),
            heads: Some(config.heads),
            head_dim: Some(config.head_dim),
            ff_dim: Some(config.ff_dim),
            alpha: Some(config.alpha),
            query_offset: Some(config.query_offset),
            passage_offset: Some(config.passage_offset),
        }
    }

    pub fn to_config(&self) -> Result<EncoderConfig> {
        let defaults = EncoderConfig::default();
        let config = EncoderConfig {
            emb_dim: self.emb_dim.unwrap_or(defaults.emb_dim),
            layers: self.layers.unwrap_or(defaults.layers),
            heads: self.heads.unwrap_or(defaults.heads),
            head_dim: self.head_dim.unwrap_or(defaults.head_dim),
            ff_dim: self.ff_dim.unwrap_or(defaults.ff_dim),
            alpha: self.alpha.unwrap_or(defaults.alpha),
            query_offset: self.query_offset.unwrap_or(defaults.query_offset),
            passage_offset: self.passage_offset.unwrap_or(defaults.passage_offset),
        };
        config.validate()?;
        Ok(config)
    }
}

pub fn load_encoder_config(path: &Path) -> Result<EncoderConfig> {
    let file: EncoderConfigFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    file.to_config()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelConfigFile {
    pub kernels: Option<usize>,
    pub mus: Option<Vec<f64>>,
    pub sigma: Option<f64>,
}

impl KernelConfigFile {
    pub fn to_config(&self) -> Result<KernelConfig> {
        let defaults = KernelConfig::default();
        let mus = match (&self.mus, self.kernels) {
            (Some(mus), _) => mus.clone(),
            (None, Some(k)) => {
                if k < 2 {
                    return Err(CliError::validation(
                        "kernel count must be at least 2 to span [-1, 1]",
                    ));
                }
                (0..k)
                    .map(|i| -1.0 + 2.0 * i as f64 / (k - 1) as f64)
                    .collect()
            }
            (None, None) => defaults.mus,
        };
        let config = KernelConfig {
            mus,
            sigma: self.sigma.unwrap_or(defaults.sigma),
        };
        config.validate()?;
        Ok(config)
    }
}

pub fn load_kernel_config(path: &Path) -> Result<KernelConfig> {
    let file: KernelConfigFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    file.to_config()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreWeightsFile {
    pub w: Vec<f64>,
    #[serde(default)]
    pub bias: f64,
}

pub fn load_score_weights(path: &Path) -> Result<ScoreWeights> {
    let file: ScoreWeightsFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    Ok(ScoreWeights {
        w: file.w,
        bias: file.bias,
    })
}
