//! Rank metrics over run files: MRR, nDCG, and Recall at a cutoff, plus
//! original-vs-debiased run comparison with relative deltas.
//!
//! A query is evaluable when it appears in the run and has at least one
//! relevant (grade > 0) passage in the qrels; metrics average over evaluable
//! queries only and report how many run queries were excluded. The rank
//! column is authoritative for ordering.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::Qrels;
use crate::error::CoreError;
use crate::kernel::RunEntry;
use crate::math;
use crate::Result;

/// A parsed run: per query, entries ordered by rank 1..n (validated dense).
#[derive(Debug, Clone, Default)]
pub struct RankedRun {
    lists: BTreeMap<String, Vec<RunEntry>>,
}

impl RankedRun {
    pub fn new(lists: BTreeMap<String, Vec<RunEntry>>) -> Result<Self> {
        for (qid, entries) in &lists {
            for (i, entry) in entries.iter().enumerate() {
                if entry.rank != i + 1 {
                    return Err(CoreError::validation(format!(
                        "query '{qid}': rank {} at position {} breaks the dense 1..n order",
                        entry.rank,
                        i + 1
                    )));
                }
            }
        }
        Ok(RankedRun { lists })
    }

    /// Collect (query id, entry) pairs, sorting each query's list by rank.
    pub fn from_entries(entries: impl IntoIterator<Item = (String, RunEntry)>) -> Result<Self> {
        let mut lists: BTreeMap<String, Vec<RunEntry>> = BTreeMap::new();
        for (qid, entry) in entries {
            lists.entry(qid).or_default().push(entry);
        }
        for list in lists.values_mut() {
            list.sort_by_key(|e| e.rank);
        }
        Self::new(lists)
    }

    pub fn get(&self, qid: &str) -> Option<&[RunEntry]> {
        self.lists.get(qid).map(Vec::as_slice)
    }

    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.lists.keys().map(String::as_str)
    }

    pub fn query_count(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[RunEntry])> {
        self.lists.iter().map(|(q, l)| (q.as_str(), l.as_slice()))
    }
}

/// Per-query values and their mean for one metric at one cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub k: usize,
    pub per_query: BTreeMap<String, f64>,
    pub mean: f64,
    /// Run queries skipped because the qrels hold no relevant passage for
    /// them (or no entry at all).
    pub excluded_queries: usize,
}

fn report_from(per_query: BTreeMap<String, f64>, k: usize, excluded: usize) -> MetricReport {
    let mean = if per_query.is_empty() {
        0.0
    } else {
        per_query.values().sum::<f64>() / per_query.len() as f64
    };
    MetricReport {
        k,
        per_query,
        mean,
        excluded_queries: excluded,
    }
}

fn for_each_evaluable<F: FnMut(&str, &[RunEntry], &BTreeMap<String, u32>)>(
    run: &RankedRun,
    qrels: &Qrels,
    mut f: F,
) -> usize {
    let mut excluded = 0;
    for (qid, entries) in run.iter() {
        match qrels.get(qid) {
            Some(judged) if judged.values().any(|&g| g > 0) => f(qid, entries, judged),
            _ => excluded += 1,
        }
    }
    excluded
}

/// Reciprocal rank of the first relevant passage within the top k, else 0.
pub fn mrr_at(run: &RankedRun, qrels: &Qrels, k: usize) -> Result<MetricReport> {
    if k == 0 {
        return Err(CoreError::invalid("cutoff k must be at least 1"));
    }
    let mut per_query = BTreeMap::new();
    let excluded = for_each_evaluable(run, qrels, |qid, entries, judged| {
        let value = entries
            .iter()
            .take(k)
            .find(|e| judged.get(&e.passage_id).is_some_and(|&g| g > 0))
            .map(|e| 1.0 / e.rank as f64)
            .unwrap_or(0.0);
        per_query.insert(qid.into(), value);
    });
    Ok(report_from(per_query, k, excluded))
}

/// Normalized discounted cumulative gain at k with linear gains:
/// `DCG = sum(grade_i / log2(i + 1))` against the qrels-ideal ordering.
pub fn ndcg_at(run: &RankedRun, qrels: &Qrels, k: usize) -> Result<MetricReport> {
    if k == 0 {
        return Err(CoreError::invalid("cutoff k must be at least 1"));
    }
    let mut per_query = BTreeMap::new();
    let excluded = for_each_evaluable(run, qrels, |qid, entries, judged| {
        let dcg: f64 = entries
            .iter()
            .take(k)
            .enumerate()
            .map(|(i, e)| {
                let gain = judged.get(&e.passage_id).copied().unwrap_or(0) as f64;
                gain / math::log2((i + 2) as f64)
            })
            .sum();
        let mut ideal: Vec<u32> = judged.values().copied().filter(|&g| g > 0).collect();
        ideal.sort_unstable_by(|a, b| b.cmp(a));
        let idcg: f64 = ideal
            .iter()
            .take(k)
            .enumerate()
            .map(|(i, &g)| g as f64 / math::log2((i + 2) as f64))
            .sum();
        per_query.insert(qid.into(), dcg / idcg);
    });
    Ok(report_from(per_query, k, excluded))
}

/// Fraction of the qrels-relevant passages retrieved within the top k.
pub fn recall_at(run: &RankedRun, qrels: &Qrels, k: usize) -> Result<MetricReport> {
    if k == 0 {
        return Err(CoreError::invalid("cutoff k must be at least 1"));
    }
    let mut per_query = BTreeMap::new();
    let excluded = for_each_evaluable(run, qrels, |qid, entries, judged| {
        let relevant_total = judged.values().filter(|&&g| g > 0).count();
        let retrieved = entries
            .iter()
            .take(k)
            .filter(|e| judged.get(&e.passage_id).is_some_and(|&g| g > 0))
            .count();
        per_query.insert(qid.into(), retrieved as f64 / relevant_total as f64);
    });
    Ok(report_from(per_query, k, excluded))
}

/// One metric's comparison row: means over the shared evaluable queries and
/// the relative delta in percent (None when the baseline mean is zero).
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub metric: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub delta_pct: Option<f64>,
}

/// Side-by-side evaluation of two runs over their shared evaluable queries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub k: usize,
    pub shared_queries: usize,
    pub rows: Vec<ComparisonRow>,
    /// Per metric: the paired per-query values (a, b) over shared queries,
    /// in query-id order; input for significance testing.
    pub paired: BTreeMap<String, Vec<(f64, f64)>>,
}

/// Compare two runs on MRR/nDCG/Recall at `k` over the intersection of their
/// evaluable queries. `delta_pct = (mean_b - mean_a) / mean_a * 100` from
/// the unrounded means.
pub fn compare_runs(
    run_a: &RankedRun,
    run_b: &RankedRun,
    qrels: &Qrels,
    k: usize,
) -> Result<ComparisonReport> {
    let metrics: [(&str, fn(&RankedRun, &Qrels, usize) -> Result<MetricReport>); 3] = [
        ("mrr", mrr_at),
        ("ndcg", ndcg_at),
        ("recall", recall_at),
    ];
    let mut shared: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    let mut paired = BTreeMap::new();
    for (name, compute) in metrics {
        let a = compute(run_a, qrels, k)?;
        let b = compute(run_b, qrels, k)?;
        let shared_ids: Vec<String> = a
            .per_query
            .keys()
            .filter(|qid| b.per_query.contains_key(*qid))
            .cloned()
            .collect();
        if shared_ids.is_empty() {
            return Err(CoreError::validation(
                "runs share no evaluable queries; nothing to compare",
            ));
        }
        let mean_of = |report: &MetricReport| {
            shared_ids.iter().map(|q| report.per_query[q]).sum::<f64>() / shared_ids.len() as f64
        };
        let mean_a = mean_of(&a);
        let mean_b = mean_of(&b);
        let delta_pct = if mean_a == 0.0 {
            None
        } else {
            Some((mean_b - mean_a) / mean_a * 100.0)
        };
        paired.insert(
            name.into(),
            shared_ids
                .iter()
                .map(|q| (a.per_query[q], b.per_query[q]))
                .collect(),
        );
        rows.push(ComparisonRow {
            metric: name.into(),
            mean_a,
            mean_b,
            delta_pct,
        });
        shared = Some(shared_ids);
    }
    Ok(ComparisonReport {
        k,
        shared_queries: shared.map(|s| s.len()).unwrap_or(0),
        rows,
        paired,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn run_of(lists: &[(&str, &[&str])]) -> RankedRun {
        RankedRun::from_entries(lists.iter().flat_map(|(qid, pids)| {
            pids.iter().enumerate().map(move |(i, pid)| {
                (
                    qid.to_string(),
                    RunEntry {
                        passage_id: pid.to_string(),
                        rank: i + 1,
                        score: 100.0 - i as f64,
                    },
                )
            })
        }))
        .unwrap()
    }

    fn qrels_of(rows: &[(&str, &str, u32)]) -> Qrels {
        let mut qrels = Qrels::new();
        for &(qid, pid, grade) in rows {
            qrels.insert(qid, pid, grade);
        }
        qrels
    }

    #[test]
    fn run_validation_requires_dense_ranks() {
        let entries = vec![(
            "q1".to_string(),
            RunEntry {
                passage_id: "p1".into(),
                rank: 2,
                score: 1.0,
            },
        )];
        assert!(RankedRun::from_entries(entries).is_err());
    }

    #[test]
    fn mrr_basic_positions() {
        let qrels = qrels_of(&[("q1", "a", 1), ("q2", "c", 1), ("q3", "z", 1)]);
        let run = run_of(&[
            ("q1", &["a", "b"]),
            ("q2", &["a", "b", "c"]),
            ("q3", &["a", "b", "c"]),
        ]);
        let report = mrr_at(&run, &qrels, 10).unwrap();
        assert_eq!(report.per_query["q1"], 1.0);
        assert!((report.per_query["q2"] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(report.per_query["q3"], 0.0);
    }

    #[test]
    fn mrr_cutoff_zeroes_late_hits() {
        let qrels = qrels_of(&[("q1", "k11", 1)]);
        let pids: Vec<String> = (1..=11).map(|i| format!("k{i}")).collect();
        let refs: Vec<&str> = pids.iter().map(String::as_str).collect();
        let run = run_of(&[("q1", &refs)]);
        let report = mrr_at(&run, &qrels, 10).unwrap();
        assert_eq!(report.per_query["q1"], 0.0);
    }

    #[test]
    fn queries_without_qrels_are_excluded_and_counted() {
        let qrels = qrels_of(&[("q1", "a", 1), ("q3", "a", 0)]);
        let run = run_of(&[("q1", &["a"]), ("q2", &["a"]), ("q3", &["a"])]);
        let report = mrr_at(&run, &qrels, 10).unwrap();
        assert_eq!(report.per_query.len(), 1);
        assert_eq!(report.excluded_queries, 2);
        assert_eq!(report.mean, 1.0);
    }

    #[test]
    fn ndcg_hand_values() {
        let qrels = qrels_of(&[("q1", "a", 1), ("q2", "b", 1)]);
        let run = run_of(&[("q1", &["a", "b", "c"]), ("q2", &["a", "b", "c"])]);
        let report = ndcg_at(&run, &qrels, 10).unwrap();
        assert!((report.per_query["q1"] - 1.0).abs() < 1e-12);
        let expected = (1.0 / libm::log2(3.0)) / 1.0;
        assert!((report.per_query["q2"] - expected).abs() < 1e-9);
        assert!((expected - 0.6309).abs() < 1e-4);
    }

    #[test]
    fn ndcg_two_relevant_hand_value() {
        // Relevant at ranks 1 and 3 of 3: (1 + 1/2) / (1 + 1/log2(3)).
        let qrels = qrels_of(&[("q1", "a", 1), ("q1", "c", 1)]);
        let run = run_of(&[("q1", &["a", "b", "c"])]);
        let report = ndcg_at(&run, &qrels, 10).unwrap();
        let expected = (1.0 + 1.0 / 2.0) / (1.0 + 1.0 / libm::log2(3.0));
        assert!((report.per_query["q1"] - expected).abs() < 1e-9);
        assert!((expected - 0.9197).abs() < 1e-4);
    }

    #[test]
    fn recall_counts_fractions() {
        let qrels = qrels_of(&[("q1", "a", 1), ("q2", "a", 1), ("q2", "z", 1)]);
        let run = run_of(&[("q1", &["a", "b"]), ("q2", &["a", "b"])]);
        let report = recall_at(&run, &qrels, 10).unwrap();
        assert_eq!(report.per_query["q1"], 1.0);
        assert_eq!(report.per_query["q2"], 0.5);
    }

    #[test]
    fn recall_zero_when_relevant_below_cutoff() {
        let qrels = qrels_of(&[("q1", "k11", 1)]);
        let pids: Vec<String> = (1..=11).map(|i| format!("k{i}")).collect();
        let refs: Vec<&str> = pids.iter().map(String::as_str).collect();
        let run = run_of(&[("q1", &refs)]);
        let report = recall_at(&run, &qrels, 10).unwrap();
        assert_eq!(report.per_query["q1"], 0.0);
    }

    #[test]
    fn all_values_stay_in_unit_interval() {
        let qrels = qrels_of(&[("q1", "a", 1), ("q1", "b", 1), ("q2", "c", 1)]);
        let run = run_of(&[("q1", &["b", "c", "a"]), ("q2", &["c"])]);
        for compute in [mrr_at, ndcg_at, recall_at] {
            let report = compute(&run, &qrels, 2).unwrap();
            for v in report.per_query.values() {
                assert!((0.0..=1.0).contains(v));
            }
        }
    }

    #[test]
    fn identical_runs_compare_at_zero_delta() {
        let qrels = qrels_of(&[("q1", "a", 1), ("q2", "b", 1)]);
        let run = run_of(&[("q1", &["a", "b"]), ("q2", &["a", "b"])]);
        let report = compare_runs(&run, &run, &qrels, 10).unwrap();
        assert_eq!(report.shared_queries, 2);
        for row in &report.rows {
            assert_eq!(row.delta_pct, Some(0.0));
            assert_eq!(row.mean_a, row.mean_b);
        }
    }

    #[test]
    fn delta_sign_tracks_degradation() {
        let qrels = qrels_of(&[("q1", "a", 1), ("q2", "b", 1)]);
        let run_a = run_of(&[("q1", &["a", "b"]), ("q2", &["b", "a"])]);
        let run_b = run_of(&[("q1", &["b", "a"]), ("q2", &["a", "b"])]);
        let report = compare_runs(&run_a, &run_b, &qrels, 10).unwrap();
        let mrr_row = &report.rows[0];
        assert_eq!(mrr_row.metric, "mrr");
        // A: 1.0 and 1.0; B: 0.5 and 0.5 -> -50%.
        assert!((mrr_row.mean_a - 1.0).abs() < 1e-12);
        assert!((mrr_row.mean_b - 0.5).abs() < 1e-12);
        assert!((mrr_row.delta_pct.unwrap() + 50.0).abs() < 1e-9);
    }

    #[test]
    fn zero_baseline_mean_marks_delta_undefined() {
        let qrels = qrels_of(&[("q1", "z", 1)]);
        let run_a = run_of(&[("q1", &["a", "b"])]);
        let run_b = run_of(&[("q1", &["z", "b"])]);
        let report = compare_runs(&run_a, &run_b, &qrels, 10).unwrap();
        assert_eq!(report.rows[0].delta_pct, None);
    }

    #[test]
    fn disjoint_runs_refuse_comparison() {
        let qrels = qrels_of(&[("q1", "a", 1), ("q2", "b", 1)]);
        let run_a = run_of(&[("q1", &["a"])]);
        let run_b = run_of(&[("q2", &["b"])]);
        assert!(compare_runs(&run_a, &run_b, &qrels, 10).is_err());
    }

    #[test]
    fn metrics_invariant_under_score_rescaling() {
        let qrels = qrels_of(&[("q1", "a", 1), ("q1", "c", 1)]);
        let base = run_of(&[("q1", &["c", "b", "a"])]);
        // Same ranking, affine-rescaled scores.
        let rescaled = RankedRun::from_entries(base.iter().flat_map(|(qid, entries)| {
            entries.iter().map(move |e| {
                (
                    qid.to_string(),
                    RunEntry {
                        passage_id: e.passage_id.clone(),
                        rank: e.rank,
                        score: e.score * 31.0 - 4.0,
                    },
                )
            })
        }))
        .unwrap();
        for compute in [mrr_at, ndcg_at, recall_at] {
            let a = compute(&base, &qrels, 3).unwrap();
            let b = compute(&rescaled, &qrels, 3).unwrap();
            assert_eq!(a.per_query, b.per_query);
        }
    }
}
