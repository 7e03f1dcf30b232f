//! Average term similarity (ATS) curves and the MATS summary over
//! term-vector dumps.
//!
//! The probe asks how much absolute-position information a set of
//! contextualized term vectors carries: it pairs up occurrences of the same
//! term in *different* passages, groups the pairs by the gap between their
//! absolute positions, and averages the pairwise cosines per gap. A
//! position-free encoder gives a flat curve; a position-sensitive one decays
//! away from gap zero. MATS condenses the curve into the mean drop relative
//! to the gap-zero point, so lower MATS means less position bias.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::rng::{derive_seed, fnv1a, SplitMix64};
use crate::similarity::cosine;
use crate::Result;

/// One dumped term vector: term, owning passage, 1-based absolute position.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorDumpRecord {
    pub term: String,
    pub passage_id: String,
    pub position: usize,
    pub vector: Vec<f32>,
}

/// One occurrence of a term inside the index.
#[derive(Debug, Clone)]
pub struct Occurrence {
    pub passage_id: String,
    pub position: usize,
    pub vector: Vec<f32>,
}

/// Couples of same-term occurrences across different passages, grouped by
/// the absolute-position gap. Groups larger than the cap hold a seeded
/// uniform sample.
#[derive(Debug, Clone)]
pub struct TermVectorIndex {
    dim: usize,
    terms: BTreeMap<String, Vec<Occurrence>>,
    /// gap -> term -> sampled (occurrence, occurrence) index pairs.
    couples: BTreeMap<usize, BTreeMap<String, Vec<(usize, usize)>>>,
    pub seed: u64,
    pub cap: usize,
}

impl TermVectorIndex {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn occurrences(&self, term: &str) -> Option<&[Occurrence]> {
        self.terms.get(term).map(Vec::as_slice)
    }

    /// Gaps that have at least one couple, ascending.
    pub fn available_deltas(&self) -> impl Iterator<Item = usize> + '_ {
        self.couples.keys().copied()
    }

    pub fn couple_count(&self, delta: usize) -> usize {
        self.couples
            .get(&delta)
            .map(|per_term| per_term.values().map(Vec::len).sum())
            .unwrap_or(0)
    }

    pub fn max_available_delta(&self) -> Option<usize> {
        self.couples.keys().next_back().copied()
    }

    /// Largest gap whose couple count reaches `min_couples`; the default
    /// curve range for reports (stability heuristic).
    pub fn default_max_delta(&self, min_couples: usize) -> Option<usize> {
        self.couples
            .iter()
            .filter(|(_, per_term)| per_term.values().map(Vec::len).sum::<usize>() >= min_couples)
            .map(|(&d, _)| d)
            .next_back()
    }
}

/// Build the couple index from dump records.
///
/// Couples are unordered pairs of occurrences of the same term in different
/// passages. Occurrences are sorted by (passage id, position) and pairs are
/// enumerated in that canonical order, so sampling is reproducible from the
/// seed alone. Terms with fewer than `min_occurrences` occurrences are
/// dropped. When a (term, gap) group exceeds `cap`, a uniform reservoir
/// sample of size `cap` is kept, seeded per (term, gap).
pub fn build_term_index(
    records: &[VectorDumpRecord],
    min_occurrences: usize,
    cap: usize,
    seed: u64,
) -> Result<TermVectorIndex> {
    if cap == 0 {
        return Err(CoreError::invalid("couple cap must be at least 1"));
    }
    let mut dim = None;
    let mut terms: BTreeMap<String, Vec<Occurrence>> = BTreeMap::new();
    for record in records {
        match dim {
            None => dim = Some(record.vector.len()),
            Some(d) if d != record.vector.len() => {
                return Err(CoreError::validation(format!(
                    "inconsistent vector dimension for term '{}': expected {d}, got {}",
                    record.term,
                    record.vector.len()
                )));
            }
            _ => {}
        }
        if record.position == 0 {
            return Err(CoreError::validation(format!(
                "term '{}' in passage '{}' has position 0; positions are 1-based",
                record.term, record.passage_id
            )));
        }
        terms
            .entry(record.term.clone())
            .or_default()
            .push(Occurrence {
                passage_id: record.passage_id.clone(),
                position: record.position,
                vector: record.vector.clone(),
            });
    }
    let dim = dim.unwrap_or(0);
    terms.retain(|_, occs| occs.len() >= min_occurrences);
    for occs in terms.values_mut() {
        occs.sort_by(|a, b| (&a.passage_id, a.position).cmp(&(&b.passage_id, b.position)));
    }

    let mut couples: BTreeMap<usize, BTreeMap<String, Vec<(usize, usize)>>> = BTreeMap::new();
    for (term, occs) in &terms {
        // Reservoir state per gap: (sampled pairs, seen count, rng).
        let mut reservoirs: BTreeMap<usize, (Vec<(usize, usize)>, usize, SplitMix64)> =
            BTreeMap::new();
        for i in 0..occs.len() {
            for j in (i + 1)..occs.len() {
                if occs[i].passage_id == occs[j].passage_id {
                    continue;
                }
                let delta = occs[i].position.abs_diff(occs[j].position);
                let (reservoir, seen, rng) = reservoirs.entry(delta).or_insert_with(|| {
                    let sub_seed =
                        derive_seed(seed, fnv1a(term.as_bytes()) ^ (delta as u64).rotate_left(17));
                    (Vec::new(), 0, SplitMix64::new(sub_seed))
                });
                if reservoir.len() < cap {
                    reservoir.push((i, j));
                } else {
                    let slot = rng.next_below(*seen as u64 + 1) as usize;
                    if slot < cap {
                        reservoir[slot] = (i, j);
                    }
                }
                *seen += 1;
            }
        }
        for (delta, (mut reservoir, _, _)) in reservoirs {
            reservoir.sort_unstable();
            couples
                .entry(delta)
                .or_default()
                .insert(term.clone(), reservoir);
        }
    }

    Ok(TermVectorIndex {
        dim,
        terms,
        couples,
        seed,
        cap,
    })
}

/// ATS at one gap: per-term mean of the couple cosines first, then an
/// unweighted mean over the terms with couples at that gap. `stddev` is the
/// population standard deviation over all individual couple cosines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtsPoint {
    pub mean: f64,
    pub stddev: f64,
    pub count: usize,
}

/// ATS at gap `delta`; absent (None) when no couples exist there.
pub fn ats(index: &TermVectorIndex, delta: usize) -> Option<AtsPoint> {
    let per_term = index.couples.get(&delta)?;
    let mut term_mean_sum = KahanSum::default();
    let mut term_count = 0usize;
    let mut pooled_sum = KahanSum::default();
    let mut pooled_sq = KahanSum::default();
    let mut pooled_count = 0usize;
    for (term, pairs) in per_term {
        if pairs.is_empty() {
            continue;
        }
        let occs = &index.terms[term];
        let mut sum = KahanSum::default();
        for &(i, j) in pairs {
            let c = cosine(&occs[i].vector, &occs[j].vector);
            sum.add(c);
            pooled_sum.add(c);
            pooled_sq.add(c * c);
            pooled_count += 1;
        }
        term_mean_sum.add(sum.value() / pairs.len() as f64);
        term_count += 1;
    }
    if term_count == 0 {
        return None;
    }
    let mean = term_mean_sum.value() / term_count as f64;
    let pooled_mean = pooled_sum.value() / pooled_count as f64;
    let variance = (pooled_sq.value() / pooled_count as f64 - pooled_mean * pooled_mean).max(0.0);
    Some(AtsPoint {
        mean,
        stddev: crate::math::sqrt(variance),
        count: pooled_count,
    })
}

/// MATS summary: the mean drop of ATS relative to the gap-zero point.
#[derive(Debug, Clone, PartialEq)]
pub struct MatsSummary {
    pub mats: f64,
    /// Population standard deviation of the per-gap difference terms.
    pub stddev: f64,
    pub max_delta: usize,
    /// Gaps in 1..=max_delta that contributed a difference term.
    pub included: usize,
    /// Gaps in 1..=max_delta with no couples, skipped from the sum.
    pub missing: Vec<usize>,
    pub normalized_by_count: bool,
}

/// Compute MATS over gaps `1..=max_delta`:
/// `sum(ats(0).mean - ats(i).mean) / (max_delta - 1)`, with gaps that have
/// no couples skipped (and reported). `normalize_by_count` divides by the
/// number of included gaps instead of the literal `max_delta - 1`.
pub fn mats(
    index: &TermVectorIndex,
    max_delta: usize,
    normalize_by_count: bool,
) -> Result<MatsSummary> {
    if max_delta < 2 {
        return Err(CoreError::invalid(format!(
            "max gap must be at least 2, got {max_delta}"
        )));
    }
    let base =
        ats(index, 0).ok_or_else(|| CoreError::validation("no gap-0 couples; MATS undefined"))?;

    let mut diffs = Vec::new();
    let mut missing = Vec::new();
    for delta in 1..=max_delta {
        match ats(index, delta) {
            Some(point) => diffs.push(base.mean - point.mean),
            None => missing.push(delta),
        }
    }
    let denom = if normalize_by_count {
        if diffs.is_empty() {
            return Err(CoreError::validation(format!(
                "no couples at any gap in 1..={max_delta}; MATS undefined"
            )));
        }
        diffs.len() as f64
    } else {
        (max_delta - 1) as f64
    };
    let sum: f64 = diffs.iter().sum();
    let mats = sum / denom;
    let stddev = if diffs.is_empty() {
        0.0
    } else {
        let mean = sum / diffs.len() as f64;
        let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / diffs.len() as f64;
        crate::math::sqrt(var)
    };
    Ok(MatsSummary {
        mats,
        stddev,
        max_delta,
        included: diffs.len(),
        missing,
        normalized_by_count: normalize_by_count,
    })
}

/// One row of the ATS curve.
#[derive(Debug, Clone, PartialEq)]
pub struct AtsRow {
    pub delta: usize,
    pub mean: f64,
    pub stddev: f64,
    pub count: usize,
}

/// The plot-ready curve plus the MATS summary.
#[derive(Debug, Clone, PartialEq)]
pub struct AtsReport {
    pub rows: Vec<AtsRow>,
    pub summary: MatsSummary,
}

/// Evaluate the full curve for gaps `0..=max_delta` and the MATS summary.
pub fn ats_report(
    index: &TermVectorIndex,
    max_delta: usize,
    normalize_by_count: bool,
) -> Result<AtsReport> {
    let summary = mats(index, max_delta, normalize_by_count)?;
    let rows = (0..=max_delta)
        .filter_map(|delta| {
            ats(index, delta).map(|p| AtsRow {
                delta,
                mean: p.mean,
                stddev: p.stddev,
                count: p.count,
            })
        })
        .collect();
    Ok(AtsReport { rows, summary })
}

#[derive(Debug, Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}
