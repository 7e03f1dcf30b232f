//! Cosine match-matrix scoring with RBF kernel pooling, and candidate
//! re-ranking on top of it.
//!
//! Every query/passage term pair gets a cosine similarity; each similarity
//! activates a bank of Gaussian kernels centred on fixed similarity levels
//! (a soft histogram). Kernel activations are summed over passage terms,
//! log-activated, summed over query terms, and combined by a linear layer
//! into the final score. Because the passage dimension is a plain sum, the
//! score is independent of passage term order.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::Collection;
use crate::encoder::{contextualize, EmbeddingTable, EncoderParams, Role};
use crate::error::CoreError;
use crate::math;
use crate::similarity::{cosine, is_zero};
use crate::Result;

/// Floor applied inside the logarithm so empty kernel sums cannot produce
/// `-inf`; 1e-10 sits at the magnitude where f32 kernel sums vanish.
pub const LOG_FLOOR: f64 = 1e-10;

/// Kernel bank: centres and shared width.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfig {
    pub mus: Vec<f64>,
    pub sigma: f64,
}

impl Default for KernelConfig {
    /// 11 kernels with centres evenly spaced from -1 to +1, width 0.1.
    fn default() -> Self {
        let mus = (0..11).map(|k| -1.0 + 0.2 * k as f64).collect();
        KernelConfig { mus, sigma: 0.1 }
    }
}

impl KernelConfig {
    pub fn kernel_count(&self) -> usize {
        self.mus.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mus.is_empty() {
            return Err(CoreError::invalid("kernel bank must not be empty"));
        }
        if self.sigma <= 0.0 {
            return Err(CoreError::invalid(format!(
                "kernel width must be positive, got {}",
                self.sigma
            )));
        }
        if self.mus.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::invalid(
                "kernel centres must be strictly increasing",
            ));
        }
        Ok(())
    }
}

/// Linear scoring layer over the pooled kernel values.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreWeights {
    pub w: Vec<f64>,
    pub bias: f64,
}

impl ScoreWeights {
    /// Uniform 1/K weights with zero bias; rank-meaningful placeholder when
    /// trained weights are not supplied.
    pub fn uniform(kernel_count: usize) -> Self {
        let w = alloc::vec![1.0 / kernel_count as f64; kernel_count];
        ScoreWeights { w, bias: 0.0 }
    }

    pub fn validate(&self, kernel_count: usize) -> Result<()> {
        if self.w.len() != kernel_count {
            return Err(CoreError::DimensionMismatch {
                expected: kernel_count,
                got: self.w.len(),
            });
        }
        if !self.bias.is_finite() || self.w.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::invalid("score weights must be finite"));
        }
        Ok(())
    }
}

/// Kernel activation tensor: one `|q| x |p|` matrix per kernel, plus a count
/// of zero input vectors (which take cosine 0 by convention).
#[derive(Debug, Clone)]
pub struct KernelActivations {
    pub matrices: Vec<Vec<Vec<f64>>>,
    pub zero_vectors: usize,
}

/// Activate the kernel bank over all query/passage cosine pairs:
/// `K_k[i][j] = exp(-(cos(q_i, p_j) - mu_k)^2 / (2 sigma^2))`.
pub fn kernel_activations(
    qvecs: &[Vec<f32>],
    pvecs: &[Vec<f32>],
    config: &KernelConfig,
) -> Result<KernelActivations> {
    config.validate()?;
    if qvecs.is_empty() || pvecs.is_empty() {
        return Err(CoreError::invalid(
            "kernel activation needs non-empty query and passage sequences",
        ));
    }
    let zero_vectors =
        qvecs.iter().filter(|v| is_zero(v)).count() + pvecs.iter().filter(|v| is_zero(v)).count();

    let cosines: Vec<Vec<f64>> = qvecs
        .iter()
        .map(|q| pvecs.iter().map(|p| cosine(q, p)).collect())
        .collect();

    let denom = 2.0 * config.sigma * config.sigma;
    let matrices = config
        .mus
        .iter()
        .map(|&mu| {
            cosines
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&c| {
                            let d = c - mu;
                            math::exp(-(d * d) / denom)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    Ok(KernelActivations {
        matrices,
        zero_vectors,
    })
}

/// Pooled value of one kernel matrix: sum over passage terms, log with the
/// [`LOG_FLOOR`] guard, sum over query terms.
pub fn pooled_kernel_value(matrix: &[Vec<f64>]) -> f64 {
    matrix
        .iter()
        .map(|row| {
            let sum: f64 = row.iter().sum();
            math::ln(sum.max(LOG_FLOOR))
        })
        .sum()
}

/// Kernel-pooled score of a query sequence against a passage sequence.
pub fn score(
    qvecs: &[Vec<f32>],
    pvecs: &[Vec<f32>],
    config: &KernelConfig,
    weights: &ScoreWeights,
) -> Result<f64> {
    weights.validate(config.kernel_count())?;
    let activations = kernel_activations(qvecs, pvecs, config)?;
    let mut s = weights.bias;
    for (matrix, &w) in activations.matrices.iter().zip(weights.w.iter()) {
        s += pooled_kernel_value(matrix) * w;
    }
    Ok(s)
}

/// One row of a ranked run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub passage_id: String,
    pub rank: usize,
    pub score: f64,
}

/// Re-rank the top `depth` first-stage candidates with the kernel scorer.
///
/// Candidates enter as a ranked `(passage id, first-stage score)` list; the
/// top `depth` are re-scored and sorted descending (ties keep the prior
/// order), candidates below the depth keep their first-stage order. Their
/// scores are shifted to sit strictly below the re-scored block so the
/// output run stays monotone.
#[allow(clippy::too_many_arguments)]
pub fn rerank(
    query_tokens: &[String],
    candidates: &[(String, f64)],
    collection: &Collection,
    table: &EmbeddingTable,
    params: &EncoderParams,
    config: &KernelConfig,
    weights: &ScoreWeights,
    depth: usize,
) -> Result<Vec<RunEntry>> {
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    if depth == 0 {
        return Err(CoreError::invalid("re-ranking depth must be at least 1"));
    }
    let query = contextualize(query_tokens, Role::Query, table, params)?;

    let cut = depth.min(candidates.len());
    let mut rescored: Vec<(usize, &str, f64)> = Vec::with_capacity(cut);
    for (prior_rank, (pid, _)) in candidates[..cut].iter().enumerate() {
        let passage = collection.get(pid).ok_or_else(|| {
            CoreError::validation(format!("candidate passage '{pid}' not in collection"))
        })?;
        let encoded = contextualize(&passage.tokens, Role::Passage, table, params)?;
        let s = score(&query.vectors, &encoded.vectors, config, weights)?;
        rescored.push((prior_rank, pid.as_str(), s));
    }
    rescored.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });

    let mut entries: Vec<RunEntry> = rescored
        .iter()
        .enumerate()
        .map(|(i, &(_, pid, s))| RunEntry {
            passage_id: pid.into(),
            rank: i + 1,
            score: s,
        })
        .collect();

    // Tail keeps the first-stage order; shift its scores below the re-scored
    // block, preserving their relative gaps.
    if cut < candidates.len() {
        let min_rescored = entries
            .iter()
            .map(|e| e.score)
            .fold(f64::INFINITY, f64::min);
        let max_tail = candidates[cut..]
            .iter()
            .map(|&(_, s)| s)
            .fold(f64::NEG_INFINITY, f64::max);
        let shift = min_rescored - 1.0 - max_tail;
        for (offset, (pid, first_stage)) in candidates[cut..].iter().enumerate() {
            entries.push(RunEntry {
                passage_id: pid.clone(),
                rank: cut + offset + 1,
                score: first_stage + shift,
            });
        }
    }
    Ok(entries)
}
