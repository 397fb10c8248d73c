//! Regression-surrogate estimators: the kernel-weighted least-squares
//! approximation of Shapley values, and a sparse lasso surrogate over
//! random ablation masks.

use super::{EstimatorError, EstimatorSettings, Session};
use crate::case::AttributionVector;
use crate::game::{enumerate_k_subsets, CoalitionMask};
use crate::oracle::CaseOracle;
use crate::regress::{
    solve_constrained_wls, solve_constrained_wls_min_norm, solve_lasso, DesignMatrix, RegressError,
    LASSO_DEFAULT_MAX_ITER, LASSO_DEFAULT_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

/// Exact binomial coefficient as f64 (n small enough that this is exact).
fn binomial_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 1..=k {
        c = c * (n - k + i) as f64 / i as f64;
    }
    c
}

/// Weight the kernel regression places on one coalition of size `s` out
/// of `n` documents: (n−1) / (C(n,s) · s · (n−s)). Defined for proper
/// non-empty coalitions only; the empty and full coalitions enter the fit
/// through the intercept shift and the efficiency constraint instead.
pub fn kernel_weight(n: usize, s: usize) -> Result<f64, EstimatorError> {
    if n < 2 || s == 0 || s >= n {
        return Err(EstimatorError::Config(format!(
            "kernel weight defined for 0 < s < n, got s={s}, n={n}"
        )));
    }
    Ok((n as f64 - 1.0) / (binomial_f64(n, s) * (s * (n - s)) as f64))
}

/// Interior design for the kernel regression: enumerate complete
/// size-levels outside-in while they fit in `cap`, then fill the
/// remainder by sampling sizes proportional to the total kernel mass per
/// size, (n−1)/(s(n−s)), drawing distinct uniform coalitions.
fn kernel_design(n: usize, cap: usize, rng: &mut ChaCha8Rng) -> Vec<CoalitionMask> {
    let mut design: Vec<CoalitionMask> = Vec::with_capacity(cap);
    let mut chosen: HashSet<u32> = HashSet::with_capacity(cap);
    let mut sampled_sizes: Vec<usize> = Vec::new();
    let mut enumerating = true;
    for s_lo in 1..=n / 2 {
        let level: Vec<usize> =
            if s_lo * 2 == n { vec![s_lo] } else { vec![s_lo, n - s_lo] };
        let level_cost: f64 = level.iter().map(|&s| binomial_f64(n, s)).sum();
        if enumerating && design.len() as f64 + level_cost <= cap as f64 {
            for &s in &level {
                for mask in enumerate_k_subsets(n, s).expect("validated size") {
                    chosen.insert(mask.bits());
                    design.push(mask);
                }
            }
        } else {
            // Levels only get more expensive further in; sample the rest.
            enumerating = false;
            sampled_sizes.extend(level);
        }
    }
    if design.len() >= cap || sampled_sizes.is_empty() {
        return design;
    }
    sampled_sizes.sort_unstable();
    let mass: Vec<f64> =
        sampled_sizes.iter().map(|&s| (n - 1) as f64 / (s * (n - s)) as f64).collect();
    let total: f64 = mass.iter().sum();
    let mut cdf = Vec::with_capacity(mass.len());
    let mut acc = 0.0;
    for m in &mass {
        acc += m / total;
        cdf.push(acc);
    }
    let mut pool: Vec<usize> = (0..n).collect();
    let need = cap - design.len();
    let mut tries: usize = 0;
    let max_tries = 10_000 + 200 * need;
    while design.len() < cap && tries < max_tries {
        tries += 1;
        let u: f64 = rng.gen();
        let s = sampled_sizes[cdf.iter().position(|&c| u <= c).unwrap_or(cdf.len() - 1)];
        for i in 0..s {
            let j = rng.gen_range(i..n);
            pool.swap(i, j);
        }
        let mask = CoalitionMask::from_indices(n, &pool[..s]).expect("indices in range");
        if chosen.insert(mask.bits()) {
            design.push(mask);
        }
    }
    if design.len() < cap {
        // Rejection sampling stalled (nearly saturated sizes): top up
        // deterministically from the unfilled levels.
        'fill: for &s in &sampled_sizes {
            for mask in enumerate_k_subsets(n, s).expect("validated size") {
                if chosen.insert(mask.bits()) {
                    design.push(mask);
                    if design.len() == cap {
                        break 'fill;
                    }
                }
            }
        }
    }
    design
}

/// Kernel-weighted linear regression estimate of Shapley values. v(∅)
/// and v(D) are always evaluated; the rest of the budget buys distinct
/// interior coalitions (complete size-levels first, sampled remainder),
/// and the scores solve a weighted least-squares fit of v(S)−v(∅) on
/// membership indicators constrained to Σφ = v(D)−v(∅). With budget
/// ≥ 2^n, the design is the full enumeration and the fit recovers exact
/// Shapley values.
pub fn kernel_shap(
    oracle: &CaseOracle,
    settings: &EstimatorSettings,
) -> Result<AttributionVector, EstimatorError> {
    let n = oracle.n();
    let min = n as u64 + 2;
    if let Some(b) = settings.budget {
        if b < min {
            return Err(EstimatorError::BudgetTooSmall { method: "kernel_shap", min, got: b });
        }
    }
    let interior_space = (1u64 << n) - 2;
    let cap = match settings.budget {
        Some(b) => (b - 2).min(interior_space) as usize,
        None => {
            if n > crate::estimators::EXACT_MAX_PLAYERS {
                return Err(EstimatorError::TooManyPlayers {
                    n,
                    max: crate::estimators::EXACT_MAX_PLAYERS,
                });
            }
            interior_space as usize
        }
    };

    let mut session = Session::new(oracle, settings.budget);
    let empty = CoalitionMask::empty(n)?;
    let full = CoalitionMask::full(n)?;
    session.evaluate_batch(&[empty, full])?;
    let v_empty = session.cached(empty).expect("evaluated above");
    let v_full = session.cached(full).expect("evaluated above");
    let total = v_full - v_empty;

    if n == 1 {
        return Ok(AttributionVector {
            case_id: oracle.case().case_id.clone(),
            method: "kernel_shap".into(),
            scores: vec![total],
            budget: settings.budget,
            oracle_calls: session.calls(),
            seed: settings.seed,
            low_confidence: false,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut design = kernel_design(n, cap, &mut rng);
    session.evaluate_batch(&design)?;

    let build = |design: &[CoalitionMask],
                 session: &Session|
     -> Result<DesignMatrix, EstimatorError> {
        let y: Vec<f64> = design
            .iter()
            .map(|&m| session.cached(m).expect("evaluated") - v_empty)
            .collect();
        let w: Vec<f64> = design
            .iter()
            .map(|&m| kernel_weight(n, m.cardinality()))
            .collect::<Result<_, _>>()?;
        Ok(DesignMatrix::from_coalitions(design, y, Some(w))?)
    };

    let mut low_confidence = false;
    let mut matrix = build(&design, &session)?;
    let scores = loop {
        match solve_constrained_wls(&matrix, total) {
            Ok(beta) => break beta,
            Err(RegressError::Singular { .. }) => {
                // Feed the fit fresh distinct coalitions while budget and
                // coalition space allow; give up via the minimum-norm
                // solution once either runs out.
                let mut augmented = false;
                let attempts_left = 16 * n;
                for _ in 0..attempts_left {
                    if design.len() as u64 >= interior_space {
                        break;
                    }
                    let mut pool: Vec<usize> = (0..n).collect();
                    let s = rng.gen_range(1..n);
                    for i in 0..s {
                        let j = rng.gen_range(i..n);
                        pool.swap(i, j);
                    }
                    let mask = CoalitionMask::from_indices(n, &pool[..s])?;
                    if design.contains(&mask) {
                        continue;
                    }
                    if session.would_exceed(&[mask]) {
                        break;
                    }
                    session.utility(mask)?;
                    design.push(mask);
                    augmented = true;
                    break;
                }
                if augmented {
                    matrix = build(&design, &session)?;
                    continue;
                }
                low_confidence = true;
                break solve_constrained_wls_min_norm(&matrix, total);
            }
            Err(other) => return Err(other.into()),
        }
    };

    Ok(AttributionVector {
        case_id: oracle.case().case_id.clone(),
        method: "kernel_shap".into(),
        scores,
        budget: settings.budget,
        oracle_calls: session.calls(),
        seed: settings.seed,
        low_confidence,
    })
}

/// Pick the lasso penalty by 5-fold cross-validation over a fixed
/// 20-point logarithmic grid from λ_max (the smallest penalty that zeroes
/// every coefficient) down four decades. Ties keep the larger penalty.
fn cross_validate_lambda(
    masks: &[CoalitionMask],
    y: &[f64],
) -> Result<f64, EstimatorError> {
    let m = masks.len();
    let n = masks[0].n();
    let y_mean = y.iter().sum::<f64>() / m as f64;

    // λ_max on standardized columns: max_j |(1/m) Σ_i x̃_ij (y_i − ȳ)|.
    let mut lambda_max = 0.0f64;
    for j in 0..n {
        let col: Vec<f64> = masks.iter().map(|mk| f64::from(u8::from(mk.contains(j)))).collect();
        let mu = col.iter().sum::<f64>() / m as f64;
        let var = col.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / m as f64;
        if var <= 1e-24 {
            continue;
        }
        let sd = var.sqrt();
        let grad: f64 = col
            .iter()
            .zip(y)
            .map(|(&x, &yi)| (x - mu) / sd * (yi - y_mean))
            .sum::<f64>()
            / m as f64;
        lambda_max = lambda_max.max(grad.abs());
    }
    if lambda_max <= 0.0 {
        return Ok(0.0);
    }

    let grid: Vec<f64> =
        (0..20).map(|g| lambda_max * 10f64.powf(-4.0 * g as f64 / 19.0)).collect();
    let folds = 5.min(m);
    let mut best = (grid[0], f64::INFINITY);
    for &lambda in &grid {
        let mut err = 0.0f64;
        for f in 0..folds {
            let lo = f * m / folds;
            let hi = (f + 1) * m / folds;
            if lo == hi {
                continue;
            }
            let train: Vec<usize> = (0..m).filter(|i| *i < lo || *i >= hi).collect();
            let train_masks: Vec<CoalitionMask> = train.iter().map(|&i| masks[i]).collect();
            let train_y: Vec<f64> = train.iter().map(|&i| y[i]).collect();
            let dm = DesignMatrix::from_coalitions(&train_masks, train_y, None)?;
            let fit = solve_lasso(&dm, lambda, 2_000, 1e-7)?;
            for i in lo..hi {
                let pred = fit.intercept
                    + (0..n)
                        .map(|j| {
                            fit.coefficients[j] * f64::from(u8::from(masks[i].contains(j)))
                        })
                        .sum::<f64>();
                err += (y[i] - pred) * (y[i] - pred);
            }
        }
        // Strict improvement required: ties resolve to the larger
        // penalty, which comes first in the descending grid.
        if err < best.1 {
            best = (lambda, err);
        }
    }
    Ok(best.0)
}

/// Sparse linear surrogate over random ablations: draw `budget` masks
/// keeping each document with probability `surrogate_mask_prob`, score
/// them (duplicates cost nothing), and fit an intercept plus
/// lasso-penalized linear model of the utility; the learned weights are
/// the scores.
pub fn context_cite(
    oracle: &CaseOracle,
    settings: &EstimatorSettings,
) -> Result<AttributionVector, EstimatorError> {
    let n = oracle.n();
    let Some(budget) = settings.budget else {
        return Err(EstimatorError::Config(
            "context_cite draws exactly `budget` training masks; set a finite budget".into(),
        ));
    };
    let min = n as u64 + 2;
    if budget < min {
        return Err(EstimatorError::BudgetTooSmall { method: "context_cite", min, got: budget });
    }
    let p = settings.surrogate_mask_prob;

    let draw = |seed: u64| -> Result<Vec<CoalitionMask>, EstimatorError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..budget)
            .map(|_| {
                let mut bits = 0u32;
                for j in 0..n {
                    if rng.gen::<f64>() < p {
                        bits |= 1 << j;
                    }
                }
                Ok(CoalitionMask::from_bits(n, bits)?)
            })
            .collect()
    };

    let mut masks = draw(settings.seed)?;
    let mut low_confidence = false;
    if masks.iter().all(|&m| m == masks[0]) {
        // Degenerate draw: every training row identical. Retry once on a
        // perturbed stream before giving up.
        masks = draw(settings.seed.wrapping_add(0x9E37_79B9_7F4A_7C15))?;
        if masks.iter().all(|&m| m == masks[0]) {
            low_confidence = true;
        }
    }

    let mut session = Session::new(oracle, Some(budget));
    session.evaluate_batch(&masks)?;
    let y: Vec<f64> = masks.iter().map(|&m| session.cached(m).expect("evaluated")).collect();

    let lambda = match settings.lasso_lambda {
        Some(l) => l,
        None => cross_validate_lambda(&masks, &y)?,
    };
    let dm = DesignMatrix::from_coalitions(&masks, y, None)?;
    let fit = solve_lasso(&dm, lambda, LASSO_DEFAULT_MAX_ITER, LASSO_DEFAULT_TOL)?;
    low_confidence |= !fit.converged;

    Ok(AttributionVector {
        case_id: oracle.case().case_id.clone(),
        method: "context_cite".into(),
        scores: fit.coefficients,
        budget: settings.budget,
        oracle_calls: session.calls(),
        seed: settings.seed,
        low_confidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::test_support::game_fixture;
    use crate::estimators::{exact_shapley, EstimatorSettings};
    use crate::oracle::synthetic::{GameKind, GameSpec};
    use crate::oracle::UtilityCache;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kernel_weight_formula() {
        assert_abs_diff_eq!(kernel_weight(4, 2).unwrap(), 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(kernel_weight(5, 1).unwrap(), 4.0 / (5.0 * 4.0), epsilon = 1e-15);
        assert!(kernel_weight(5, 0).is_err());
        assert!(kernel_weight(5, 5).is_err());
    }

    #[test]
    fn design_enumerates_complete_levels_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // n=6: level {1,5} costs 12, level {2,4} costs 30, level {3} costs 20.
        let design = kernel_design(6, 12, &mut rng);
        assert_eq!(design.len(), 12);
        assert!(design.iter().all(|m| {
            let s = m.cardinality();
            s == 1 || s == 5
        }));

        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let design = kernel_design(6, 20, &mut rng);
        assert_eq!(design.len(), 20);
        let singles = design.iter().filter(|m| m.cardinality() == 1).count();
        let fives = design.iter().filter(|m| m.cardinality() == 5).count();
        assert_eq!(singles + fives, 12, "first level fully enumerated");
        // The 8 remaining rows are sampled from sizes {2,3,4}, distinct.
        let bits: HashSet<u32> = design.iter().map(|m| m.bits()).collect();
        assert_eq!(bits.len(), design.len(), "design rows are distinct");
    }

    #[test]
    fn design_saturates_to_full_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let design = kernel_design(4, 14, &mut rng);
        assert_eq!(design.len(), 14, "2^4 - 2 interior coalitions");
        let bits: HashSet<u32> = design.iter().map(|m| m.bits()).collect();
        assert_eq!(bits.len(), 14);
    }

    #[test]
    fn full_enumeration_recovers_exact_shapley() {
        let spec = GameSpec::interaction(
            GameKind::Synergy,
            vec![0.0, 0.0, 1.25, -0.5, 2.0, 0.75, 0.3, 1.1],
            (0, 1),
            2.5,
        )
        .unwrap();
        let (case, scorer) = game_fixture("k1", spec);
        let cache = UtilityCache::in_memory();
        let oracle = CaseOracle::new(&case, &scorer, "m", &cache).unwrap();
        let exact = exact_shapley(&oracle, &EstimatorSettings::default()).unwrap();
        let settings = EstimatorSettings { budget: Some(256), seed: 0, ..Default::default() };
        let got = kernel_shap(&oracle, &settings).unwrap();
        assert_eq!(got.oracle_calls, 256);
        for j in 0..8 {
            assert_abs_diff_eq!(got.scores[j], exact.scores[j], epsilon = 1e-6);
        }
        assert!(!got.low_confidence);
    }

    #[test]
    fn additive_games_are_recovered_exactly_from_any_full_rank_design() {
        let weights = vec![1.0, -0.5, 2.0, 0.25, 0.8, 1.6];
        let (case, scorer) = game_fixture("k2", GameSpec::additive(weights.clone()).unwrap());
        let cache = UtilityCache::in_memory();
        let oracle = CaseOracle::new(&case, &scorer, "m", &cache).unwrap();
        // Budget 14 enumerates the complete {1, 5} size level, which is
        // already full rank; larger budgets add sampled interior rows.
        for budget in [14u64, 16, 32] {
            let settings = EstimatorSettings { budget: Some(budget), seed: 3, ..Default::default() };
            let got = kernel_shap(&oracle, &settings).unwrap();
            assert!(got.oracle_calls <= budget);
            for j in 0..6 {
                assert_abs_diff_eq!(got.scores[j], weights[j], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn kernel_scores_satisfy_efficiency_by_construction() {
        let spec = GameSpec::interaction(
            GameKind::Redundancy,
            vec![0.0, 0.0, 1.0, 0.5, 0.25, 1.5, 0.75],
            (0, 1),
            2.0,
        )
        .unwrap();
        let (case, scorer) = game_fixture("k3", spec.clone());
        let cache = UtilityCache::in_memory();
        let oracle = CaseOracle::new(&case, &scorer, "m", &cache).unwrap();
        let settings = EstimatorSettings { budget: Some(16), seed: 1, ..Default::default() };
        let got = kernel_shap(&oracle, &settings).unwrap();
        let n = 7;
        let total = spec.value(CoalitionMask::full(n).unwrap())
            - spec.value(CoalitionMask::empty(n).unwrap());
        assert_abs_diff_eq!(got.scores.iter().sum::<f64>(), total, epsilon = 1e-9);
    }

    #[test]
    fn kernel_respects_budget_exactly() {
        let (case, scorer) = game_fixture("k4", GameSpec::additive(vec![1.0; 10]).unwrap());
        let cache = UtilityCache::in_memory();
        let oracle = CaseOracle::new(&case, &scorer, "m", &cache).unwrap();
        for budget in [12u64, 32, 64, 100] {
            let settings =
                EstimatorSettings { budget: Some(budget), seed: 0, ..Default::default() };
            let got = kernel_shap(&oracle, &settings).unwrap();
            assert_eq!(got.oracle_calls, budget, "kernel spends its whole budget");
        }
        let too_small = EstimatorSettings { budget: Some(11), ..Default::default() };
        assert!(matches!(
            kernel_shap(&oracle, &too_small),
            Err(EstimatorError::BudgetTooSmall { min: 12, .. })
        ));
    }

    #[test]
    fn kernel_single_document_case() {
        let (case, scorer) = game_fixture("k5", GameSpec::additive(vec![3.5]).unwrap());
        let cache = UtilityCache::in_memory();
        let oracle = CaseOracle::new(&case, &scorer, "m", &cache).unwrap();
        let settings = EstimatorSettings { budget: Some(3), ..Default::default() };
        let got = kernel_shap(&oracle, &settings).unwrap();
        assert_eq!(got.scores, vec![3.5]);
        assert_eq!(got.oracle_calls, 2);
    }

    #[test]
    fn kernel_is_deterministic_per_seed() {
        let (case, scorer) =
            game_fixture("k6", GameSpec::additive(vec![0.3, 1.7, 0.9, 2.4, 0.1, 1.1, 0.6, 1.9, 0.2, 0.8]).unwrap());
        let cache = UtilityCache::in_memory();
        let oracle = CaseOracle::new(&case, &scorer, "m", &cache).unwrap();
        let settings = EstimatorSettings { budget: Some(40), seed: 13, ..Default::default() };
        let a = kernel_shap(&oracle, &settings).unwrap();
        let b = kernel_shap(&oracle, &settings).unwrap();
        assert_eq!(a.scores, b.scores);
        assert_eq!(a.oracle_calls, b.oracle_calls);
    }

    #[test]
    fn context_cite_ranks_additive_weights() {
        let weights = vec![0.2, 2.0, 0.7, 1.4, 0.05, 1.0];
        let (case, scorer) = game_fixture("c1", GameSpec::additive(weights.clone()).unwrap());
        let cache = UtilityCache::in_memory();
        let oracle = CaseOracle::new(&case, &scorer, "m", &cache).unwrap();
        let settings = EstimatorSettings { budget: Some(100), seed: 2, ..Default::default() };
        let got = context_cite(&oracle, &settings).unwrap();
        assert!(got.oracle_calls <= 100);
        // Order agreement with the true weights.
        let rank = |v: &[f64]| {
            let mut idx: Vec<usize> = (0..v.len()).collect();
            idx.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap());
            idx
        };
        assert_eq!(rank(&got.scores), rank(&weights));
        for (s, w) in got.scores.iter().zip(&weights) {
            assert!((s - w).abs() < 0.2, "score {s} vs weight {w}");
        }
    }

    #[test]
    fn context_cite_zero_lambda_matches_least_squares() {
        let weights = vec![1.0, -2.0, 0.5, 3.0];
        let (case, scorer) = game_fixture("c2", GameSpec::additive(weights.clone()).unwrap());
        let cache = UtilityCache::in_memory();
        let oracle = CaseOracle::new(&case, &scorer, "m", &cache).unwrap();
        let settings = EstimatorSettings {
            budget: Some(64),
            seed: 4,
            lasso_lambda: Some(0.0),
            ..Default::default()
        };
        let got = context_cite(&oracle, &settings).unwrap();
        // The linear model is the true model, so OLS recovers it.
        for j in 0..4 {
            assert_abs_diff_eq!(got.scores[j], weights[j], epsilon = 1e-6);
        }
    }

    #[test]
    fn context_cite_huge_lambda_zeroes_everything() {
        let (case, scorer) =
            game_fixture("c3", GameSpec::additive(vec![1.0, 2.0, 3.0, 4.0]).unwrap());
        let cache = UtilityCache::in_memory();
        let oracle = CaseOracle::new(&case, &scorer, "m", &cache).unwrap();
        let settings = EstimatorSettings {
            budget: Some(32),
            seed: 0,
            lasso_lambda: Some(1e6),
            ..Default::default()
        };
        let got = context_cite(&oracle, &settings).unwrap();
        assert!(got.scores.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn context_cite_is_deterministic_and_counts_unique_masks() {
        let (case, scorer) =
            game_fixture("c4", GameSpec::additive(vec![0.5, 1.5, 2.5]).unwrap());
        let cache = UtilityCache::in_memory();
        let oracle = CaseOracle::new(&case, &scorer, "m", &cache).unwrap();
        // Budget 40 over a 3-document case: only 8 distinct masks exist,
        // so duplicates are inevitable and must not be double-charged.
        let settings = EstimatorSettings { budget: Some(40), seed: 6, ..Default::default() };
        let a = context_cite(&oracle, &settings).unwrap();
        assert!(a.oracle_calls <= 8, "at most 2^3 distinct evaluations, got {}", a.oracle_calls);
        let b = context_cite(&oracle, &settings).unwrap();
        assert_eq!(a.scores, b.scores);
    }

    #[test]
    fn context_cite_requires_a_budget() {
        let (case, scorer) = game_fixture("c5", GameSpec::additive(vec![1.0; 3]).unwrap());
        let cache = UtilityCache::in_memory();
        let oracle = CaseOracle::new(&case, &scorer, "m", &cache).unwrap();
        let settings = EstimatorSettings { budget: None, ..Default::default() };
        assert!(matches!(context_cite(&oracle, &settings), Err(EstimatorError::Config(_))));
        let too_small = EstimatorSettings { budget: Some(4), ..Default::default() };
        assert!(matches!(
            context_cite(&oracle, &too_small),
            Err(EstimatorError::BudgetTooSmall { min: 5, .. })
        ));
    }
}
