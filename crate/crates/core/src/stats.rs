//! Paired Wilcoxon signed-rank test for per-query metric comparisons.
//!
//! Two-sided test over paired samples. Differences of zero are dropped by
//! default (classic convention) or kept in the ranking and then discarded
//! (Pratt) behind [`ZeroPolicy::Pratt`]. Absolute differences are ranked
//! with average ranks on ties. For up to 25 effective pairs the p-value
//! comes from the exact conditional permutation distribution (a subset-sum
//! count over the observed ranks); larger samples use the normal
//! approximation with continuity and tie corrections.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::math;
use crate::Result;

/// Largest effective sample size evaluated with the exact null
/// distribution.
pub const EXACT_LIMIT: usize = 25;

/// Handling of zero paired differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroPolicy {
    /// Remove zero differences before ranking (classic).
    #[default]
    Drop,
    /// Rank zeros along with everything else, then drop their ranks from
    /// both rank sums (Pratt).
    Pratt,
}

/// Test outcome. `statistic` is the signed rank sum `w_plus - w_minus`, so
/// swapping the two samples negates it; `p_value` is `None` when no nonzero
/// differences remain.
#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult {
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub n_effective: usize,
    pub p_value: Option<f64>,
    pub exact: bool,
}

/// Two-sided Wilcoxon signed-rank test on paired samples (differences taken
/// as `b - a`).
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], policy: ZeroPolicy) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(CoreError::invalid(
            "paired samples must have the same length",
        ));
    }
    if a.is_empty() {
        return Err(CoreError::invalid("paired samples must not be empty"));
    }
    if a.iter().chain(b.iter()).any(|x| !x.is_finite()) {
        return Err(CoreError::invalid("paired samples must be finite"));
    }

    let all_diffs: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| y - x).collect();
    let ranked: Vec<f64> = match policy {
        ZeroPolicy::Drop => all_diffs.iter().copied().filter(|d| *d != 0.0).collect(),
        ZeroPolicy::Pratt => all_diffs.clone(),
    };
    let n_ranked = ranked.len();
    let n_effective = all_diffs.iter().filter(|d| **d != 0.0).count();
    if n_effective == 0 {
        return Ok(WilcoxonResult {
            statistic: 0.0,
            w_plus: 0.0,
            w_minus: 0.0,
            n_effective: 0,
            p_value: None,
            exact: true,
        });
    }

    // Average ranks over |d| ties; with Pratt, zeros occupy the lowest
    // ranks and are discarded afterwards.
    let mut order: Vec<usize> = (0..n_ranked).collect();
    order.sort_by(|&i, &j| {
        ranked[i]
            .abs()
            .partial_cmp(&ranked[j].abs())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut rank_of = vec![0.0f64; n_ranked];
    let mut tie_correction = 0.0f64;
    let mut i = 0;
    while i < n_ranked {
        let mut j = i;
        while j + 1 < n_ranked && ranked[order[j + 1]].abs() == ranked[order[i]].abs() {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            rank_of[idx] = avg;
        }
        // The zero block (Pratt) never enters the rank sums, so its
        // internal tie does not correct the variance.
        if ranked[order[i]] != 0.0 {
            let t = (j - i + 1) as f64;
            tie_correction += t * t * t - t;
        }
        i = j + 1;
    }

    let mut w_plus = 0.0f64;
    let mut w_minus = 0.0f64;
    let mut nonzero_ranks: Vec<f64> = Vec::with_capacity(n_effective);
    for (idx, &d) in ranked.iter().enumerate() {
        if d > 0.0 {
            w_plus += rank_of[idx];
            nonzero_ranks.push(rank_of[idx]);
        } else if d < 0.0 {
            w_minus += rank_of[idx];
            nonzero_ranks.push(rank_of[idx]);
        }
    }

    let p_value = if n_effective <= EXACT_LIMIT {
        Some(exact_two_sided_p(&nonzero_ranks, w_plus))
    } else {
        Some(normal_two_sided_p(
            w_plus,
            n_ranked,
            all_diffs.len() - n_effective,
            policy,
            tie_correction,
        ))
    };

    Ok(WilcoxonResult {
        statistic: w_plus - w_minus,
        w_plus,
        w_minus,
        n_effective,
        p_value,
        exact: n_effective <= EXACT_LIMIT,
    })
}

/// Exact two-sided p-value by counting sign assignments: every subset of the
/// observed ranks is equally likely under the null, so the CDF of `W+` is a
/// subset-sum count. Ranks are doubled to make half-ranks integral.
fn exact_two_sided_p(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0 + 0.5) as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut dp = vec![0.0f64; total + 1];
    dp[0] = 1.0;
    for &r in &doubled {
        for s in (r..=total).rev() {
            dp[s] += dp[s - r];
        }
    }
    let assignments = libm::exp2(ranks.len() as f64);
    let w2 = (w_plus * 2.0 + 0.5) as usize;
    let cdf_le: f64 = dp[..=w2.min(total)].iter().sum::<f64>() / assignments;
    let cdf_ge: f64 = dp[w2.min(total)..].iter().sum::<f64>() / assignments;
    (2.0 * cdf_le.min(cdf_ge)).min(1.0)
}

/// Normal approximation with continuity correction. With the Pratt policy
/// the null mean and variance subtract the zero block's contribution.
fn normal_two_sided_p(
    w_plus: f64,
    n_ranked: usize,
    zeros: usize,
    policy: ZeroPolicy,
    tie_correction: f64,
) -> f64 {
    let n = n_ranked as f64;
    let (mean, mut variance) = match policy {
        ZeroPolicy::Drop => (n * (n + 1.0) / 4.0, n * (n + 1.0) * (2.0 * n + 1.0) / 24.0),
        ZeroPolicy::Pratt => {
            let z = zeros as f64;
            (
                (n * (n + 1.0) - z * (z + 1.0)) / 4.0,
                (n * (n + 1.0) * (2.0 * n + 1.0) - z * (z + 1.0) * (2.0 * z + 1.0)) / 24.0,
            )
        }
    };
    variance -= tie_correction / 48.0;
    let centered = w_plus - mean;
    let correction = 0.5 * sign(centered);
    let z_score = (centered - correction) / math::sqrt(variance);
    let p = 2.0 * (1.0 - standard_normal_cdf(z_score.abs()));
    p.clamp(0.0, 1.0)
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + math::erf(x / math::sqrt(2.0)))
}
