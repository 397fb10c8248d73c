//! The three evaluation protocols: rank agreement against exact Shapley
//! values, impact-set precision against the brute-force oracle, and the
//! normalized A/B analysis over paired scenario cases.

use super::impact::exhaustive_impact_set;
use super::{kendall_tau, pearson, precision_against_set, spearman, EvalError};
use crate::case::QueryCase;
use crate::estimators::{exact_shapley, run_method, EstimatorError, EstimatorSettings, Method};
use crate::oracle::{CaseOracle, Scorer, UtilityCache};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

/// What to run: the method/budget/seed grid, the ks for precision
/// metrics, and the estimator knobs shared by every run.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub methods: Vec<Method>,
    pub budgets: Vec<u64>,
    pub seeds: Vec<u64>,
    pub ks: Vec<usize>,
    pub settings: EstimatorSettings,
    pub model_id: String,
    pub parallelism: usize,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            budgets: vec![32, 64, 100],
            seeds: vec![0],
            ks: vec![1, 3, 5],
            settings: EstimatorSettings::default(),
            model_id: "synthetic".into(),
            parallelism: 1,
        }
    }
}

impl ExperimentPlan {
    fn validate(&self) -> Result<(), EvalError> {
        if self.methods.is_empty() {
            return Err(EvalError::Input("experiment plan needs at least one method".into()));
        }
        if self.seeds.is_empty() {
            return Err(EvalError::Input("experiment plan needs at least one seed".into()));
        }
        if self.budgets.is_empty() && self.methods.iter().any(|m| !m.is_budget_free()) {
            return Err(EvalError::Input(
                "budgeted methods requested but the budget list is empty".into(),
            ));
        }
        Ok(())
    }

    /// The (budget, seed) grid for one method: budget-free methods run
    /// once, budgeted methods run the full product.
    fn runs_for(&self, method: Method) -> Vec<(Option<u64>, u64)> {
        if method.is_budget_free() {
            vec![(None, self.seeds[0])]
        } else {
            self.budgets
                .iter()
                .flat_map(|&b| self.seeds.iter().map(move |&s| (Some(b), s)))
                .collect()
        }
    }

    fn settings_for(&self, budget: Option<u64>, seed: u64) -> EstimatorSettings {
        EstimatorSettings { budget, seed, ..self.settings.clone() }
    }
}

/// One CSV row of an experiment report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub case_id: String,
    pub scenario: String,
    pub method: String,
    pub budget: Option<u64>,
    pub seed: u64,
    pub metric: String,
    pub k: Option<usize>,
    pub value: f64,
}

/// Pooled mean of one metric cell (over cases and seeds).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryMean {
    pub method: String,
    pub budget: Option<u64>,
    pub metric: String,
    pub k: Option<usize>,
    /// Experiment-3 document order ("ab"/"ba"); absent elsewhere.
    pub order: Option<String>,
    pub value: f64,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub cases_total: usize,
    /// Cases dropped entirely (oracle failure, missing pair, ...).
    pub cases_failed: u64,
    /// Individual method runs that failed on otherwise-usable cases.
    pub runs_failed: u64,
    /// Metric values that could not be computed (for example undefined
    /// correlations on constant scores) and were left out of the means.
    pub rows_excluded: u64,
    pub means: Vec<SummaryMean>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

impl ExperimentReport {
    /// Pooled mean for one metric cell, if present.
    pub fn mean(
        &self,
        method: &str,
        budget: Option<u64>,
        metric: &str,
        k: Option<usize>,
        order: Option<&str>,
    ) -> Option<f64> {
        self.summary
            .means
            .iter()
            .find(|m| {
                m.method == method
                    && m.budget == budget
                    && m.metric == metric
                    && m.k == k
                    && m.order.as_deref() == order
            })
            .map(|m| m.value)
    }
}

/// Whether an estimator failure should sink just this case (data- or
/// oracle-dependent) or abort the whole batch (a configuration problem
/// that would fail every case the same way).
fn is_case_local(e: &EstimatorError) -> bool {
    !matches!(
        e,
        EstimatorError::Config(_)
            | EstimatorError::BudgetTooSmall { .. }
            | EstimatorError::TooManyPlayers { .. }
    )
}

type SeedKey = (String, Option<u64>, u64, String, Option<usize>, String);
type PoolKey = (String, Option<u64>, String, Option<usize>, Option<String>);

/// Row sink that accumulates per-seed means (emitted as extra CSV rows)
/// and pooled means (emitted in the JSON summary) as rows arrive.
struct Collector {
    rows: Vec<ReportRow>,
    seed_means: BTreeMap<SeedKey, (f64, u64)>,
    pooled: BTreeMap<PoolKey, (f64, u64)>,
    cases_failed: u64,
    runs_failed: u64,
    rows_excluded: u64,
}

impl Collector {
    fn new() -> Self {
        Self {
            rows: Vec::new(),
            seed_means: BTreeMap::new(),
            pooled: BTreeMap::new(),
            cases_failed: 0,
            runs_failed: 0,
            rows_excluded: 0,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        case: &QueryCase,
        method: &str,
        budget: Option<u64>,
        seed: u64,
        metric: &str,
        k: Option<usize>,
        value: f64,
        bucket: &str,
    ) {
        self.rows.push(ReportRow {
            case_id: case.case_id.clone(),
            scenario: case.scenario_tag.as_str().to_string(),
            method: method.to_string(),
            budget,
            seed,
            metric: metric.to_string(),
            k,
            value,
        });
        let seed_key =
            (method.to_string(), budget, seed, metric.to_string(), k, bucket.to_string());
        let e = self.seed_means.entry(seed_key).or_insert((0.0, 0));
        e.0 += value;
        e.1 += 1;
        let order = if bucket.is_empty() { None } else { Some(bucket.to_string()) };
        let p = self
            .pooled
            .entry((method.to_string(), budget, metric.to_string(), k, order))
            .or_insert((0.0, 0));
        p.0 += value;
        p.1 += 1;
    }

    fn finish(mut self, experiment: &str, cases_total: usize) -> ExperimentReport {
        for ((method, budget, seed, metric, k, bucket), (sum, count)) in &self.seed_means {
            let case_id = if bucket.is_empty() {
                "__mean__".to_string()
            } else {
                format!("__mean_{bucket}__")
            };
            self.rows.push(ReportRow {
                case_id,
                scenario: String::new(),
                method: method.clone(),
                budget: *budget,
                seed: *seed,
                metric: metric.clone(),
                k: *k,
                value: sum / *count as f64,
            });
        }
        let means = self
            .pooled
            .iter()
            .map(|((method, budget, metric, k, order), (sum, count))| SummaryMean {
                method: method.clone(),
                budget: *budget,
                metric: metric.clone(),
                k: *k,
                order: order.clone(),
                value: sum / *count as f64,
                count: *count,
            })
            .collect();
        ExperimentReport {
            rows: self.rows,
            summary: Summary {
                experiment: experiment.to_string(),
                cases_total,
                cases_failed: self.cases_failed,
                runs_failed: self.runs_failed,
                rows_excluded: self.rows_excluded,
                means,
            },
        }
    }
}

fn make_oracle<'a>(
    case: &'a QueryCase,
    scorer: &'a dyn Scorer,
    cache: &'a UtilityCache,
    plan: &ExperimentPlan,
) -> Result<CaseOracle<'a>, EvalError> {
    Ok(CaseOracle::new(case, scorer, plan.model_id.clone(), cache)?
        .with_parallelism(plan.parallelism))
}

/// Rank agreement against exact Shapley: Spearman, Pearson, Kendall
/// tau-b, and top-k precision for each k in `plan.ks`, per (method,
/// budget, seed) and case, plus per-seed mean rows and pooled means.
pub fn experiment1(
    cases: &[QueryCase],
    scorer: &dyn Scorer,
    cache: &UtilityCache,
    plan: &ExperimentPlan,
) -> Result<ExperimentReport, EvalError> {
    plan.validate()?;
    let mut acc = Collector::new();
    for case in cases {
        if let Err(e) = run_exp1_case(case, scorer, cache, plan, &mut acc) {
            match e {
                EvalError::Estimator(ref inner) if !is_case_local(inner) => return Err(e),
                EvalError::Input(_) | EvalError::TooManyPlayers { .. } => return Err(e),
                _ => {
                    acc.cases_failed += 1;
                    log::warn!("case '{}' failed: {e}", case.case_id);
                }
            }
        }
    }
    Ok(acc.finish("experiment1", cases.len()))
}

fn run_exp1_case(
    case: &QueryCase,
    scorer: &dyn Scorer,
    cache: &UtilityCache,
    plan: &ExperimentPlan,
    acc: &mut Collector,
) -> Result<(), EvalError> {
    let oracle = make_oracle(case, scorer, cache, plan)?;
    let reference =
        exact_shapley(&oracle, &plan.settings_for(None, plan.seeds[0]))?;
    for &method in &plan.methods {
        for (budget, seed) in plan.runs_for(method) {
            let av = match run_method(method, &oracle, &plan.settings_for(budget, seed)) {
                Ok(av) => av,
                Err(e) if is_case_local(&e) => {
                    acc.runs_failed += 1;
                    log::warn!("{method} on case '{}' failed: {e}", case.case_id);
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let correlations: [(&str, Result<f64, EvalError>); 3] = [
                ("spearman", spearman(&av.scores, &reference.scores)),
                ("pearson", pearson(&av.scores, &reference.scores)),
                ("kendall_tau", kendall_tau(&av.scores, &reference.scores)),
            ];
            for (name, outcome) in correlations {
                match outcome {
                    Ok(v) => acc.push(case, method.name(), budget, seed, name, None, v, ""),
                    Err(EvalError::UndefinedCorrelation(_)) => acc.rows_excluded += 1,
                    Err(e) => return Err(e),
                }
            }
            for &k in &plan.ks {
                let p = super::precision_at_k(&av.scores, &reference.scores, k)?;
                acc.push(case, method.name(), budget, seed, "precision", Some(k), p, "");
            }
        }
    }
    Ok(())
}

/// Impact-set precision: how much of each method's top-k lands in the
/// brute-force maximum-impact k-subset, per k in `plan.ks`.
pub fn experiment2(
    cases: &[QueryCase],
    scorer: &dyn Scorer,
    cache: &UtilityCache,
    plan: &ExperimentPlan,
) -> Result<ExperimentReport, EvalError> {
    plan.validate()?;
    let mut acc = Collector::new();
    for case in cases {
        if let Err(e) = run_exp2_case(case, scorer, cache, plan, &mut acc) {
            match e {
                EvalError::Estimator(ref inner) if !is_case_local(inner) => return Err(e),
                EvalError::Input(_) | EvalError::TooManyPlayers { .. } => return Err(e),
                _ => {
                    acc.cases_failed += 1;
                    log::warn!("case '{}' failed: {e}", case.case_id);
                }
            }
        }
    }
    Ok(acc.finish("experiment2", cases.len()))
}

fn run_exp2_case(
    case: &QueryCase,
    scorer: &dyn Scorer,
    cache: &UtilityCache,
    plan: &ExperimentPlan,
    acc: &mut Collector,
) -> Result<(), EvalError> {
    let oracle = make_oracle(case, scorer, cache, plan)?;
    // One exhaustive reference per (case, k), shared by every method run.
    let mut references: HashMap<usize, Vec<usize>> = HashMap::new();
    for &k in &plan.ks {
        references.insert(k, exhaustive_impact_set(&oracle, k)?.member_indices());
    }
    for &method in &plan.methods {
        for (budget, seed) in plan.runs_for(method) {
            let av = match run_method(method, &oracle, &plan.settings_for(budget, seed)) {
                Ok(av) => av,
                Err(e) if is_case_local(&e) => {
                    acc.runs_failed += 1;
                    log::warn!("{method} on case '{}' failed: {e}", case.case_id);
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            for &k in &plan.ks {
                let p = precision_against_set(&av.scores, &references[&k], k)?;
                acc.push(case, method.name(), budget, seed, "precision_impact", Some(k), p, "");
            }
        }
    }
    Ok(())
}

/// Normalized A/B analysis over paired scenario cases: min-max normalize
/// each run's score vector, report the pair documents' normalized scores
/// per (method, budget, order). Cases whose pair reads (smaller, larger)
/// are the AB orientation; the swapped pair marks BA.
pub fn experiment3(
    cases: &[QueryCase],
    scorer: &dyn Scorer,
    cache: &UtilityCache,
    plan: &ExperimentPlan,
) -> Result<ExperimentReport, EvalError> {
    plan.validate()?;
    let mut acc = Collector::new();
    for case in cases {
        if let Err(e) = run_exp3_case(case, scorer, cache, plan, &mut acc) {
            match e {
                EvalError::Estimator(ref inner) if !is_case_local(inner) => return Err(e),
                EvalError::TooManyPlayers { .. } => return Err(e),
                _ => {
                    acc.cases_failed += 1;
                    log::warn!("case '{}' rejected: {e}", case.case_id);
                }
            }
        }
    }
    Ok(acc.finish("experiment3", cases.len()))
}

fn run_exp3_case(
    case: &QueryCase,
    scorer: &dyn Scorer,
    cache: &UtilityCache,
    plan: &ExperimentPlan,
    acc: &mut Collector,
) -> Result<(), EvalError> {
    let Some((a_idx, b_idx)) = case.positive_pair else {
        return Err(EvalError::Input(format!(
            "case '{}' carries no positive_pair",
            case.case_id
        )));
    };
    let n = case.n();
    if a_idx >= n || b_idx >= n || a_idx == b_idx {
        return Err(EvalError::Input(format!(
            "case '{}' has invalid positive_pair ({a_idx}, {b_idx})",
            case.case_id
        )));
    }
    let order = if a_idx < b_idx { "ab" } else { "ba" };
    let oracle = make_oracle(case, scorer, cache, plan)?;
    for &method in &plan.methods {
        for (budget, seed) in plan.runs_for(method) {
            let av = match run_method(method, &oracle, &plan.settings_for(budget, seed)) {
                Ok(av) => av,
                Err(e) if is_case_local(&e) => {
                    acc.runs_failed += 1;
                    log::warn!("{method} on case '{}' failed: {e}", case.case_id);
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let lo = av.scores.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = av.scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !(hi - lo).is_finite() || hi == lo {
                // Degenerate normalization (constant scores): flag and
                // keep this run out of the means.
                acc.rows_excluded += 2;
                log::warn!(
                    "{method} on case '{}' produced constant scores; A/B row excluded",
                    case.case_id
                );
                continue;
            }
            let norm = |v: f64| (v - lo) / (hi - lo);
            acc.push(case, method.name(), budget, seed, "norm_a", None, norm(av.scores[a_idx]), order);
            acc.push(case, method.name(), budget, seed, "norm_b", None, norm(av.scores[b_idx]), order);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::ScenarioTag;
    use crate::oracle::synthetic::{GameKind, GameSpec, SyntheticScorer};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn additive_batch(count: usize, n: usize, seed: u64) -> (Vec<QueryCase>, SyntheticScorer) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scorer = SyntheticScorer::new();
        let cases: Vec<QueryCase> = (0..count)
            .map(|i| {
                let id = format!("add-{i:03}");
                let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
                scorer.insert(&id, GameSpec::additive(weights).unwrap());
                crate::oracle::tests::toy_case(&id, n)
            })
            .collect();
        (cases, scorer)
    }

    fn plan(methods: Vec<Method>, budgets: Vec<u64>, ks: Vec<usize>) -> ExperimentPlan {
        ExperimentPlan { methods, budgets, ks, ..Default::default() }
    }

    #[test]
    fn loo_is_perfect_on_additive_games() {
        let (cases, scorer) = additive_batch(5, 6, 1);
        let cache = UtilityCache::in_memory();
        let p = plan(vec![Method::Loo], vec![], vec![1, 3]);
        let report = experiment1(&cases, &scorer, &cache, &p).unwrap();
        assert_eq!(report.summary.cases_failed, 0);
        for row in report.rows.iter().filter(|r| r.metric == "spearman") {
            assert_abs_diff_eq!(row.value, 1.0, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(
            report.mean("loo", None, "spearman", None, None).unwrap(),
            1.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            report.mean("loo", None, "precision", Some(3), None).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn full_budget_kernel_matches_reference_per_case() {
        let (cases, scorer) = additive_batch(3, 6, 2);
        let cache = UtilityCache::in_memory();
        let p = plan(vec![Method::KernelShap], vec![64], vec![1]);
        let report = experiment1(&cases, &scorer, &cache, &p).unwrap();
        for row in report.rows.iter().filter(|r| r.metric == "pearson") {
            assert!(row.value > 1.0 - 1e-6, "pearson {} below exact recovery", row.value);
        }
    }

    #[test]
    fn empty_case_list_is_an_empty_report() {
        let scorer = SyntheticScorer::new();
        let cache = UtilityCache::in_memory();
        let p = ExperimentPlan::default();
        let report = experiment1(&[], &scorer, &cache, &p).unwrap();
        assert!(report.rows.is_empty());
        assert_eq!(report.summary.cases_total, 0);
        assert_eq!(report.summary.cases_failed, 0);
    }

    #[test]
    fn failed_cases_are_counted_not_fatal() {
        let (mut cases, scorer) = additive_batch(2, 5, 3);
        // A case with no registered game: the oracle errors, the batch
        // must continue.
        cases.push(crate::oracle::tests::toy_case("orphan", 5));
        let cache = UtilityCache::in_memory();
        let p = plan(vec![Method::Loo], vec![], vec![1]);
        let report = experiment1(&cases, &scorer, &cache, &p).unwrap();
        assert_eq!(report.summary.cases_failed, 1);
        assert_eq!(report.summary.cases_total, 3);
        let loo_rows = report
            .rows
            .iter()
            .filter(|r| r.metric == "spearman" && r.case_id != "__mean__")
            .count();
        assert_eq!(loo_rows, 2, "two healthy cases contribute rows");
    }

    #[test]
    fn configuration_errors_abort_the_batch() {
        let (cases, scorer) = additive_batch(2, 6, 4);
        let cache = UtilityCache::in_memory();
        // Budget 4 < n+2: every case would fail identically.
        let p = plan(vec![Method::KernelShap], vec![4], vec![1]);
        assert!(experiment1(&cases, &scorer, &cache, &p).is_err());
    }

    #[test]
    fn mean_rows_pool_over_cases_per_seed() {
        let (cases, scorer) = additive_batch(4, 5, 5);
        let cache = UtilityCache::in_memory();
        let p = ExperimentPlan {
            methods: vec![Method::KernelShap],
            budgets: vec![16],
            seeds: vec![1, 2],
            ks: vec![1],
            ..Default::default()
        };
        let report = experiment1(&cases, &scorer, &cache, &p).unwrap();
        let mean_rows: Vec<&ReportRow> =
            report.rows.iter().filter(|r| r.case_id == "__mean__").collect();
        // 4 metrics (spearman, pearson, kendall_tau, precision@1) × 2 seeds.
        assert_eq!(mean_rows.len(), 8);
        for row in &mean_rows {
            let per_case: Vec<f64> = report
                .rows
                .iter()
                .filter(|r| {
                    r.case_id != "__mean__"
                        && r.metric == row.metric
                        && r.seed == row.seed
                        && r.k == row.k
                })
                .map(|r| r.value)
                .collect();
            assert_eq!(per_case.len(), 4);
            let expect = per_case.iter().sum::<f64>() / 4.0;
            assert_abs_diff_eq!(row.value, expect, epsilon = 1e-12);
        }
        // The pooled summary averages over seeds too.
        let pooled = report.mean("kernel_shap", Some(16), "spearman", None, None).unwrap();
        let count = report
            .summary
            .means
            .iter()
            .find(|m| m.metric == "spearman")
            .unwrap()
            .count;
        assert_eq!(count, 8, "4 cases × 2 seeds");
        assert!(pooled.is_finite());
    }

    #[test]
    fn exact_shapley_tops_impact_precision_on_additive_games() {
        let (cases, scorer) = additive_batch(4, 6, 6);
        let cache = UtilityCache::in_memory();
        let p = plan(vec![Method::Shapley], vec![], vec![2, 3]);
        let report = experiment2(&cases, &scorer, &cache, &p).unwrap();
        // Additive: ranking by weight IS the impact ordering.
        for row in report.rows.iter().filter(|r| r.case_id != "__mean__") {
            assert_abs_diff_eq!(row.value, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn loo_impact_signatures_on_pure_pair_games() {
        // Synergy: both pair members carry LOO = r, the top-2 is exactly
        // the pair. Redundancy with weighted bystanders: the pair has
        // LOO 0 and ranks last.
        let mut scorer = SyntheticScorer::new();
        let syn = crate::oracle::tests::toy_case("syn", 5);
        scorer.insert(
            "syn",
            GameSpec::interaction(GameKind::Synergy, vec![0.0; 5], (0, 1), 1.0).unwrap(),
        );
        let red = crate::oracle::tests::toy_case("red", 5);
        scorer.insert(
            "red",
            GameSpec::interaction(
                GameKind::Redundancy,
                vec![0.0, 0.0, 0.3, 0.6, 0.9],
                (0, 1),
                2.0,
            )
            .unwrap(),
        );
        let cache = UtilityCache::in_memory();
        let p = plan(vec![Method::Loo], vec![], vec![2]);
        let report = experiment2(&[syn, red], &scorer, &cache, &p).unwrap();
        let by_case = |id: &str| {
            report
                .rows
                .iter()
                .find(|r| r.case_id == id && r.k == Some(2))
                .map(|r| r.value)
                .unwrap()
        };
        assert_abs_diff_eq!(by_case("syn"), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(by_case("red"), 0.0, epsilon = 1e-12);
    }

    fn paired_scenario_cases() -> (Vec<QueryCase>, SyntheticScorer) {
        let mut scorer = SyntheticScorer::new();
        let mut cases = Vec::new();
        for (suffix, pair) in [("ab", (0usize, 1usize)), ("ba", (1usize, 0usize))] {
            let id = format!("syn-000-{suffix}");
            let mut case = crate::oracle::tests::toy_case(&id, 6);
            case.scenario_tag = ScenarioTag::Synergy;
            case.positive_pair = Some(pair);
            scorer.insert(
                &id,
                GameSpec::interaction(
                    GameKind::Synergy,
                    vec![0.0, 0.0, 0.4, 0.8, 1.2, 0.2],
                    (0, 1),
                    2.0,
                )
                .unwrap(),
            );
            cases.push(case);
        }
        (cases, scorer)
    }

    #[test]
    fn ab_analysis_reports_symmetric_pairs_per_order() {
        let (cases, scorer) = paired_scenario_cases();
        let cache = UtilityCache::in_memory();
        let p = plan(vec![Method::Shapley], vec![], vec![]);
        let report = experiment3(&cases, &scorer, &cache, &p).unwrap();
        for order in ["ab", "ba"] {
            let a = report.mean("shapley", None, "norm_a", None, Some(order)).unwrap();
            let b = report.mean("shapley", None, "norm_b", None, Some(order)).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
        // Mean rows are tagged by order.
        assert!(report.rows.iter().any(|r| r.case_id == "__mean_ab__"));
        assert!(report.rows.iter().any(|r| r.case_id == "__mean_ba__"));
    }

    #[test]
    fn missing_pair_rejects_the_case_only() {
        let (mut cases, scorer) = paired_scenario_cases();
        cases[1].positive_pair = None;
        let cache = UtilityCache::in_memory();
        let p = plan(vec![Method::Shapley], vec![], vec![]);
        let report = experiment3(&cases, &scorer, &cache, &p).unwrap();
        assert_eq!(report.summary.cases_failed, 1);
        assert!(report.rows.iter().any(|r| r.case_id == "syn-000-ab"));
    }

    #[test]
    fn constant_scores_are_flagged_and_excluded() {
        // A game in which every document is a dummy: LOO scores are all
        // zero, normalization is degenerate.
        let mut scorer = SyntheticScorer::new();
        let id = "flat-ab";
        let mut case = crate::oracle::tests::toy_case(id, 4);
        case.scenario_tag = ScenarioTag::Redundancy;
        case.positive_pair = Some((0, 1));
        scorer.insert(
            id,
            GameSpec::interaction(GameKind::Redundancy, vec![0.0; 4], (0, 1), 1.0).unwrap(),
        );
        let cache = UtilityCache::in_memory();
        let p = plan(vec![Method::Loo], vec![], vec![]);
        let report = experiment3(&[case], &scorer, &cache, &p).unwrap();
        assert_eq!(report.summary.rows_excluded, 2);
        assert!(report.rows.iter().all(|r| !r.case_id.starts_with("flat")));
    }
}
