//! Evaluation: rank metrics for comparing attribution vectors, the
//! exhaustive impact-set oracle, and the three experiment harnesses.

pub mod experiments;
pub mod impact;
pub mod report;

pub use experiments::{
    experiment1, experiment2, experiment3, ExperimentPlan, ExperimentReport, ReportRow, Summary,
    SummaryMean,
};
pub use impact::{exhaustive_impact_set, ImpactSet, IMPACT_MAX_PLAYERS};

use crate::estimators::EstimatorError;
use crate::game::GameError;
use crate::oracle::OracleError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    /// Correlation is undefined on constant input (zero variance).
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),
    #[error("metric input: {0}")]
    Input(String),
    #[error("exhaustive search over {n} documents would need C({n},k) evaluations; \
             the cap is {max} documents")]
    TooManyPlayers { n: usize, max: usize },
    #[error("report output at {path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Game(#[from] GameError),
}

fn check_scores(name: &str, v: &[f64]) -> Result<(), EvalError> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(EvalError::Input(format!("{name} contains a non-finite score")));
    }
    Ok(())
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<(), EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::Input(format!(
            "score vectors differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(EvalError::Input("correlations need at least two scores".into()));
    }
    check_scores("left input", a)?;
    check_scores("right input", b)
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

/// 1-based ranks, ties replaced by the mean rank of the tied block.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).expect("finite scores"));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share the average of ranks i+1..=j+1.
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Plain Pearson correlation of two score vectors.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    check_pair(a, b)?;
    for (side, v) in [("left", a), ("right", b)] {
        if is_constant(v) {
            return Err(EvalError::UndefinedCorrelation(format!(
                "{side} input is constant"
            )));
        }
    }
    let m = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / m;
    let mean_b = b.iter().sum::<f64>() / m;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    Ok((cov / (var_a.sqrt() * var_b.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman rank correlation: Pearson on average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    check_pair(a, b)?;
    pearson(&average_ranks(a), &average_ranks(b))
}

/// Kendall's tau-b: concordant-minus-discordant over all pairs, with the
/// tie-corrected denominator.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    check_pair(a, b)?;
    let m = a.len();
    let (mut concordant, mut discordant) = (0u64, 0u64);
    let (mut ties_a, mut ties_b) = (0u64, 0u64);
    for i in 0..m {
        for j in (i + 1)..m {
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            if da == 0.0 {
                ties_a += 1;
            }
            if db == 0.0 {
                ties_b += 1;
            }
            if da == 0.0 || db == 0.0 {
                continue;
            }
            if (da > 0.0) == (db > 0.0) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let n0 = (m * (m - 1) / 2) as f64;
    let denom = ((n0 - ties_a as f64) * (n0 - ties_b as f64)).sqrt();
    if denom == 0.0 {
        return Err(EvalError::UndefinedCorrelation("an input is entirely tied".into()));
    }
    Ok(((concordant as f64 - discordant as f64) / denom).clamp(-1.0, 1.0))
}

/// Indices of the k largest scores, descending; equal scores break toward
/// the smaller document index.
pub fn top_k_indices(scores: &[f64], k: usize) -> Result<Vec<usize>, EvalError> {
    check_scores("scores", scores)?;
    if k == 0 || k > scores.len() {
        return Err(EvalError::Input(format!(
            "k={k} out of range for {} scores",
            scores.len()
        )));
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("finite scores")
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    Ok(idx)
}

/// Fraction of the prediction's top-k documents found in `members`.
pub fn precision_against_set(
    pred: &[f64],
    members: &[usize],
    k: usize,
) -> Result<f64, EvalError> {
    if let Some(&bad) = members.iter().find(|&&i| i >= pred.len()) {
        return Err(EvalError::Input(format!(
            "reference member {bad} out of range for {} scores",
            pred.len()
        )));
    }
    let top = top_k_indices(pred, k)?;
    let hits = top.iter().filter(|i| members.contains(i)).count();
    Ok(hits as f64 / k as f64)
}

/// Top-k agreement between two score vectors:
/// |top_k(pred) ∩ top_k(reference)| / k.
pub fn precision_at_k(pred: &[f64], reference: &[f64], k: usize) -> Result<f64, EvalError> {
    if pred.len() != reference.len() {
        return Err(EvalError::Input(format!(
            "score vectors differ in length ({} vs {})",
            pred.len(),
            reference.len()
        )));
    }
    let ref_top = top_k_indices(reference, k)?;
    precision_against_set(pred, &ref_top, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn ranks_average_over_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 20.0, 30.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
        assert_eq!(average_ranks(&[5.0, 5.0, 5.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn spearman_known_values() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(spearman(&a, &a).unwrap(), 1.0, epsilon = 1e-12);
        let rev = [4.0, 3.0, 2.0, 1.0];
        assert_abs_diff_eq!(spearman(&a, &rev).unwrap(), -1.0, epsilon = 1e-12);
        let b = [1.0, 2.0, 4.0, 3.0];
        assert_abs_diff_eq!(spearman(&a, &b).unwrap(), 0.8, epsilon = 1e-12);
    }

    #[test]
    fn kendall_known_values() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(kendall_tau(&a, &a).unwrap(), 1.0, epsilon = 1e-12);
        let rev = [4.0, 3.0, 2.0, 1.0];
        assert_abs_diff_eq!(kendall_tau(&a, &rev).unwrap(), -1.0, epsilon = 1e-12);
        // 5 concordant, 1 discordant pair.
        let b = [1.0, 2.0, 4.0, 3.0];
        assert_abs_diff_eq!(kendall_tau(&a, &b).unwrap(), 4.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn kendall_tau_b_handles_ties() {
        // x has one tied pair; classic tau-b hand computation:
        // pairs: 6 total, ties_x = 1 → denom = sqrt(5 * 6).
        let a = [1.0, 1.0, 2.0, 3.0];
        let b = [1.0, 2.0, 3.0, 4.0];
        let expect = 5.0 / (5.0f64 * 6.0).sqrt();
        assert_abs_diff_eq!(kendall_tau(&a, &b).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn constant_inputs_are_undefined() {
        let c = [2.0, 2.0, 2.0];
        let v = [1.0, 2.0, 3.0];
        assert!(matches!(spearman(&c, &v), Err(EvalError::UndefinedCorrelation(_))));
        assert!(matches!(pearson(&v, &c), Err(EvalError::UndefinedCorrelation(_))));
        assert!(matches!(kendall_tau(&c, &v), Err(EvalError::UndefinedCorrelation(_))));
    }

    #[test]
    fn length_and_finiteness_guards() {
        assert!(matches!(spearman(&[1.0], &[1.0]), Err(EvalError::Input(_))));
        assert!(matches!(spearman(&[1.0, 2.0], &[1.0, 2.0, 3.0]), Err(EvalError::Input(_))));
        assert!(matches!(
            pearson(&[1.0, f64::NAN, 2.0], &[1.0, 2.0, 3.0]),
            Err(EvalError::Input(_))
        ));
    }

    #[test]
    fn top_k_breaks_ties_by_ascending_index() {
        let scores = [1.0, 3.0, 3.0, 0.5];
        assert_eq!(top_k_indices(&scores, 1).unwrap(), vec![1]);
        assert_eq!(top_k_indices(&scores, 3).unwrap(), vec![1, 2, 0]);
        assert!(top_k_indices(&scores, 0).is_err());
        assert!(top_k_indices(&scores, 5).is_err());
    }

    #[test]
    fn precision_examples() {
        let x = [5.0, 4.0, 3.0, 2.0, 1.0, 0.0];
        for k in 1..=6 {
            assert_eq!(precision_at_k(&x, &x, k).unwrap(), 1.0);
        }
        // Disjoint top-3 sets.
        let y = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(precision_at_k(&x, &y, 3).unwrap(), 0.0);
        // Overlap of two in three.
        let pred = [9.0, 8.0, 7.0, 0.0];
        let reference = [9.0, 8.0, 0.0, 7.0];
        assert_abs_diff_eq!(precision_at_k(&pred, &reference, 3).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn precision_against_explicit_members() {
        let pred = [0.1, 0.9, 0.5, 0.4];
        assert_eq!(precision_against_set(&pred, &[1, 2], 2).unwrap(), 1.0);
        assert_eq!(precision_against_set(&pred, &[0, 3], 2).unwrap(), 0.0);
        assert!(precision_against_set(&pred, &[9], 2).is_err());
    }

    proptest! {
        /// Rank metrics ignore strictly increasing transforms.
        #[test]
        fn rank_metrics_are_transform_invariant(
            base in proptest::collection::vec(-50.0f64..50.0, 3..10),
            other in proptest::collection::vec(-50.0f64..50.0, 10),
            scale in 0.1f64..4.0,
            shift in -10.0f64..10.0,
        ) {
            let b = &other[..base.len()];
            prop_assume!(!is_constant(&base) && !is_constant(b));
            let transformed: Vec<f64> =
                base.iter().map(|&x| scale * x + shift).collect();
            let s1 = spearman(&base, b).unwrap();
            let s2 = spearman(&transformed, b).unwrap();
            prop_assert!((s1 - s2).abs() < 1e-9);
            let k1 = kendall_tau(&base, b).unwrap();
            let k2 = kendall_tau(&transformed, b).unwrap();
            prop_assert!((k1 - k2).abs() < 1e-9);
        }

        /// All metrics stay inside their documented ranges.
        #[test]
        fn metric_ranges(
            a in proptest::collection::vec(-10.0f64..10.0, 4..12),
            b_raw in proptest::collection::vec(-10.0f64..10.0, 12),
            k in 1usize..4,
        ) {
            let b = &b_raw[..a.len()];
            prop_assume!(!is_constant(&a) && !is_constant(b));
            let s = spearman(&a, b).unwrap();
            prop_assert!((-1.0..=1.0).contains(&s));
            let t = kendall_tau(&a, b).unwrap();
            prop_assert!((-1.0..=1.0).contains(&t));
            let p = precision_at_k(&a, b, k).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
        }

        /// Spearman is literally Pearson on rank vectors.
        #[test]
        fn spearman_is_pearson_on_ranks(
            a in proptest::collection::vec(-10.0f64..10.0, 4..10),
            b_raw in proptest::collection::vec(-10.0f64..10.0, 10),
        ) {
            let b = &b_raw[..a.len()];
            prop_assume!(!is_constant(&a) && !is_constant(b));
            let direct = spearman(&a, b).unwrap();
            let via_ranks = pearson(&average_ranks(&a), &average_ranks(b)).unwrap();
            prop_assert!((direct - via_ranks).abs() < 1e-12);
        }
    }
}
