//! Forward-only gated Transformer encoder over word embeddings.
//!
//! The encoder adds sinusoidal positional encodings to the input embeddings,
//! runs a stack of standard self-attention layers, and mixes the result back
//! with the raw embeddings through a convex gate `alpha`:
//!
//! `out_i = embed_i * alpha + forward(embed + encoding)_i * (1 - alpha)`
//!
//! so `alpha = 1` yields position-free bag-of-words vectors and `alpha = 0`
//! yields fully contextualized (and position-aware) ones. Query and passage
//! sequences use different positional offsets so their encodings never
//! collide (passages start at 500 by default).
//!
//! Only forward evaluation is supported; weights are either randomly
//! initialized from a seed or loaded from a tensor archive by the caller.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::math;
use crate::rng::{derive_seed, fnv1a, SplitMix64};
use crate::Result;

const LAYER_NORM_EPS: f64 = 1e-6;

/// Token -> vector lookup with a fixed dimension. Out-of-vocabulary tokens
/// resolve to the zero vector and are flagged by [`contextualize`].
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: BTreeMap<String, Vec<f32>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(CoreError::invalid("embedding dimension must be positive"));
        }
        Ok(EmbeddingTable {
            dim,
            vectors: BTreeMap::new(),
        })
    }

    pub fn insert(&mut self, token: impl Into<String>, vector: Vec<f32>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim,
                got: vector.len(),
            });
        }
        self.vectors.insert(token.into(), vector);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<&[f32]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.vectors.iter().map(|(t, v)| (t.as_str(), v.as_slice()))
    }

    /// Random table over a vocabulary, uniform in `[-scale, scale)`. Each
    /// token's vector is seeded from (seed, token) independently, so the
    /// result does not depend on vocabulary iteration order.
    pub fn random<'a>(
        dim: usize,
        vocab: impl IntoIterator<Item = &'a str>,
        seed: u64,
        scale: f32,
    ) -> Result<Self> {
        let mut table = EmbeddingTable::new(dim)?;
        for token in vocab {
            let mut rng = SplitMix64::new(derive_seed(seed, fnv1a(token.as_bytes())));
            let v: Vec<f32> = (0..dim).map(|_| rng.next_symmetric_f32(scale)).collect();
            table.insert(token, v)?;
        }
        Ok(table)
    }
}

/// Which positional offset a sequence uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Query,
    Passage,
}

/// Architecture and gate settings.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderConfig {
    pub emb_dim: usize,
    pub layers: usize,
    pub heads: usize,
    pub head_dim: usize,
    pub ff_dim: usize,
    /// Gate in [0, 1]: weight of the raw embedding in the output mix.
    pub alpha: f32,
    pub query_offset: usize,
    pub passage_offset: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            emb_dim: 300,
            layers: 2,
            heads: 16,
            head_dim: 32,
            ff_dim: 100,
            alpha: 0.5,
            query_offset: 0,
            passage_offset: 500,
        }
    }
}

impl EncoderConfig {
    /// Attention width: heads * head size.
    pub fn model_dim(&self) -> usize {
        self.heads * self.head_dim
    }

    pub fn offset(&self, role: Role) -> usize {
        match role {
            Role::Query => self.query_offset,
            Role::Passage => self.passage_offset,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.emb_dim == 0 || self.emb_dim % 2 != 0 {
            return Err(CoreError::invalid(format!(
                "embedding dimension must be even and positive, got {}",
                self.emb_dim
            )));
        }
        if self.heads == 0 || self.head_dim == 0 || self.ff_dim == 0 {
            return Err(CoreError::invalid(
                "heads, head size, and feed-forward dimension must be positive",
            ));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(CoreError::invalid(format!(
                "gate alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Dense layer `y = W x + b`, row-major `rows x cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub rows: usize,
    pub cols: usize,
    pub weight: Vec<f32>,
    pub bias: Vec<f32>,
}

impl Linear {
    pub fn new(rows: usize, cols: usize, weight: Vec<f32>, bias: Vec<f32>) -> Result<Self> {
        if weight.len() != rows * cols {
            return Err(CoreError::DimensionMismatch {
                expected: rows * cols,
                got: weight.len(),
            });
        }
        if bias.len() != rows {
            return Err(CoreError::DimensionMismatch {
                expected: rows,
                got: bias.len(),
            });
        }
        Ok(Linear {
            rows,
            cols,
            weight,
            bias,
        })
    }

    /// Xavier-uniform weights, zero bias.
    fn random(rows: usize, cols: usize, rng: &mut SplitMix64) -> Self {
        let bound = math::sqrt(6.0 / (rows + cols) as f64) as f32;
        let weight = (0..rows * cols)
            .map(|_| rng.next_symmetric_f32(bound))
            .collect();
        Linear {
            rows,
            cols,
            weight,
            bias: vec![0.0; rows],
        }
    }

    fn apply(&self, x: &[f32], out: &mut Vec<f32>) {
        debug_assert_eq!(x.len(), self.cols);
        out.clear();
        for r in 0..self.rows {
            let row = &self.weight[r * self.cols..(r + 1) * self.cols];
            let mut acc = self.bias[r];
            for (w, v) in row.iter().zip(x.iter()) {
                acc += w * v;
            }
            out.push(acc);
        }
    }
}

/// Per-vector layer normalization with learned scale and shift.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerNorm {
    pub gamma: Vec<f32>,
    pub beta: Vec<f32>,
}

impl LayerNorm {
    fn identity(dim: usize) -> Self {
        LayerNorm {
            gamma: vec![1.0; dim],
            beta: vec![0.0; dim],
        }
    }

    fn apply(&self, x: &mut [f32]) {
        let d = x.len() as f64;
        let mean = x.iter().map(|&v| v as f64).sum::<f64>() / d;
        let var = x
            .iter()
            .map(|&v| {
                let c = v as f64 - mean;
                c * c
            })
            .sum::<f64>()
            / d;
        let inv = 1.0 / math::sqrt(var + LAYER_NORM_EPS);
        for (i, v) in x.iter_mut().enumerate() {
            let normed = (*v as f64 - mean) * inv;
            *v = (normed as f32) * self.gamma[i] + self.beta[i];
        }
    }
}

/// One post-norm encoder layer: self-attention + feed-forward, each wrapped
/// in residual + layer norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderLayer {
    pub w_q: Linear,
    pub w_k: Linear,
    pub w_v: Linear,
    pub w_o: Linear,
    pub ln_attn: LayerNorm,
    pub ff1: Linear,
    pub ff2: Linear,
    pub ln_ff: LayerNorm,
}

/// Full forward-evaluation weights, including the input/output projections
/// that bridge the embedding width and the attention width.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub config: EncoderConfig,
    pub in_proj: Linear,
    pub out_proj: Linear,
    pub layers: Vec<EncoderLayer>,
}

impl EncoderParams {
    /// Seeded random initialization (Xavier-uniform weights, zero biases,
    /// identity layer norms).
    pub fn random(config: EncoderConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let d_model = config.model_dim();
        let mut rng = SplitMix64::new(seed);
        let in_proj = Linear::random(d_model, config.emb_dim, &mut rng);
        let mut layers = Vec::with_capacity(config.layers);
        for _ in 0..config.layers {
            layers.push(EncoderLayer {
                w_q: Linear::random(d_model, d_model, &mut rng),
                w_k: Linear::random(d_model, d_model, &mut rng),
                w_v: Linear::random(d_model, d_model, &mut rng),
                w_o: Linear::random(d_model, d_model, &mut rng),
                ln_attn: LayerNorm::identity(d_model),
                ff1: Linear::random(config.ff_dim, d_model, &mut rng),
                ff2: Linear::random(d_model, config.ff_dim, &mut rng),
                ln_ff: LayerNorm::identity(d_model),
            });
        }
        let out_proj = Linear::random(config.emb_dim, d_model, &mut rng);
        Ok(EncoderParams {
            config,
            in_proj,
            out_proj,
            layers,
        })
    }
}

/// A contextualized sequence: one output vector per token, with the 1-based
/// in-sequence positions and OOV flags carried along.
#[derive(Debug, Clone)]
pub struct ContextualizedSequence {
    pub tokens: Vec<String>,
    pub positions: Vec<usize>,
    pub vectors: Vec<Vec<f32>>,
    pub oov: Vec<bool>,
}

/// Sinusoidal positional encoding matrix of shape `length x d`. Row `p`
/// encodes absolute position `p + offset`: entry `2i` is
/// `sin(pos / 10000^(2i/d))` and entry `2i+1` the matching cosine.
pub fn positional_encoding(length: usize, d: usize, offset: usize) -> Result<Vec<Vec<f32>>> {
    if d == 0 || d % 2 != 0 {
        return Err(CoreError::invalid(format!(
            "encoding dimension must be even and positive, got {d}"
        )));
    }
    if length == 0 {
        return Err(CoreError::invalid("encoding length must be at least 1"));
    }
    let mut rows = Vec::with_capacity(length);
    for p in 0..length {
        let pos = (p + offset) as f64;
        let mut row = Vec::with_capacity(d);
        for i in 0..d / 2 {
            let denom = math::powf(10_000.0, (2 * i) as f64 / d as f64);
            let angle = pos / denom;
            row.push(math::sin(angle) as f32);
            row.push(math::cos(angle) as f32);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Run the encoder stack over an input sequence (embeddings with the
/// positional encoding already added). A zero-layer stack is the identity;
/// otherwise the input is projected to the attention width, passed through
/// the layers, and projected back to the embedding width.
pub fn transformer_forward(input: &[Vec<f32>], params: &EncoderParams) -> Result<Vec<Vec<f32>>> {
    if input.is_empty() {
        return Err(CoreError::invalid("cannot encode an empty sequence"));
    }
    let emb_dim = params.config.emb_dim;
    for v in input {
        if v.len() != emb_dim {
            return Err(CoreError::DimensionMismatch {
                expected: emb_dim,
                got: v.len(),
            });
        }
    }
    if params.layers.is_empty() {
        return Ok(input.to_vec());
    }

    let mut scratch = Vec::new();
    let mut hidden: Vec<Vec<f32>> = input
        .iter()
        .map(|v| {
            params.in_proj.apply(v, &mut scratch);
            scratch.clone()
        })
        .collect();

    for layer in &params.layers {
        hidden = encoder_layer_forward(&hidden, layer, &params.config);
    }

    Ok(hidden
        .iter()
        .map(|v| {
            params.out_proj.apply(v, &mut scratch);
            scratch.clone()
        })
        .collect())
}

fn encoder_layer_forward(
    x: &[Vec<f32>],
    layer: &EncoderLayer,
    config: &EncoderConfig,
) -> Vec<Vec<f32>> {
    let len = x.len();
    let d_model = config.model_dim();
    let heads = config.heads;
    let head_dim = config.head_dim;
    let scale = 1.0 / math::sqrt(head_dim as f64) as f32;

    let mut scratch = Vec::new();
    let mut project = |lin: &Linear| -> Vec<Vec<f32>> {
        x.iter()
            .map(|v| {
                lin.apply(v, &mut scratch);
                scratch.clone()
            })
            .collect()
    };
    let q = project(&layer.w_q);
    let k = project(&layer.w_k);
    let v = project(&layer.w_v);

    // Scaled dot-product attention per head, then the output projection.
    let mut attended = vec![vec![0.0f32; d_model]; len];
    let mut scores = vec![0.0f32; len];
    for h in 0..heads {
        let lo = h * head_dim;
        let hi = lo + head_dim;
        for i in 0..len {
            for (j, score) in scores.iter_mut().enumerate() {
                let mut dot = 0.0f32;
                for (qa, ka) in q[i][lo..hi].iter().zip(k[j][lo..hi].iter()) {
                    dot += qa * ka;
                }
                *score = dot * scale;
            }
            softmax_in_place(&mut scores);
            let out = &mut attended[i][lo..hi];
            for (j, &w) in scores.iter().enumerate() {
                for (o, &val) in out.iter_mut().zip(v[j][lo..hi].iter()) {
                    *o += w * val;
                }
            }
        }
    }

    let mut after_attn = Vec::with_capacity(len);
    for i in 0..len {
        layer.w_o.apply(&attended[i], &mut scratch);
        let mut residual: Vec<f32> = x[i]
            .iter()
            .zip(scratch.iter())
            .map(|(a, b)| a + b)
            .collect();
        layer.ln_attn.apply(&mut residual);
        after_attn.push(residual);
    }

    let mut out = Vec::with_capacity(len);
    let mut inner = Vec::new();
    for h in &after_attn {
        layer.ff1.apply(h, &mut inner);
        for v in inner.iter_mut() {
            *v = v.max(0.0); // ReLU
        }
        layer.ff2.apply(&inner, &mut scratch);
        let mut residual: Vec<f32> = h.iter().zip(scratch.iter()).map(|(a, b)| a + b).collect();
        layer.ln_ff.apply(&mut residual);
        out.push(residual);
    }
    out
}

fn softmax_in_place(scores: &mut [f32]) {
    let max = scores.iter().copied().fold(f32::NEG_INFINITY, f32::max);
    let mut sum = 0.0f32;
    for s in scores.iter_mut() {
        *s = math::exp_f32(*s - max);
        sum += *s;
    }
    for s in scores.iter_mut() {
        *s /= sum;
    }
}

/// Contextualize a token sequence: embed, add the role's positional
/// encoding, run the encoder, and mix with the raw embeddings through the
/// gate. OOV tokens embed as zero vectors and are flagged.
pub fn contextualize(
    tokens: &[String],
    role: Role,
    table: &EmbeddingTable,
    params: &EncoderParams,
) -> Result<ContextualizedSequence> {
    if tokens.is_empty() {
        return Err(CoreError::invalid("cannot contextualize an empty sequence"));
    }
    params.config.validate()?;
    if table.dim() != params.config.emb_dim {
        return Err(CoreError::DimensionMismatch {
            expected: params.config.emb_dim,
            got: table.dim(),
        });
    }
    let dim = table.dim();
    let mut oov = Vec::with_capacity(tokens.len());
    let embeddings: Vec<Vec<f32>> = tokens
        .iter()
        .map(|t| match table.get(t) {
            Some(v) => {
                oov.push(false);
                v.to_vec()
            }
            None => {
                oov.push(true);
                vec![0.0; dim]
            }
        })
        .collect();

    let alpha = params.config.alpha;
    let vectors = if alpha == 1.0 {
        // Closed gate: the transformer contributes nothing.
        embeddings.clone()
    } else {
        let encoding = positional_encoding(tokens.len(), dim, params.config.offset(role))?;
        let combined: Vec<Vec<f32>> = embeddings
            .iter()
            .zip(encoding.iter())
            .map(|(e, pe)| e.iter().zip(pe.iter()).map(|(a, b)| a + b).collect())
            .collect();
        let contextual = transformer_forward(&combined, params)?;
        embeddings
            .iter()
            .zip(contextual.iter())
            .map(|(e, c)| {
                e.iter()
                    .zip(c.iter())
                    .map(|(ev, cv)| ev * alpha + cv * (1.0 - alpha))
                    .collect()
            })
            .collect()
    };

    Ok(ContextualizedSequence {
        tokens: tokens.to_vec(),
        positions: (1..=tokens.len()).collect(),
        vectors,
        oov,
    })
}
