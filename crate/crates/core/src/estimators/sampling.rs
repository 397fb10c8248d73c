//! Monte Carlo Shapley estimators: permutation sampling with truncation,
//! and Beta-weighted coalition-size sampling.

use super::{EstimatorError, EstimatorSettings, Session};
use crate::case::AttributionVector;
use crate::game::CoalitionMask;
use crate::oracle::CaseOracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

/// Derive the marginal-sample stopping point: explicit `sample_cap` wins,
/// otherwise scale with the budget so small budgets stop promptly once
/// the coalition space is saturated and memoized lookups stop paying.
fn resolve_sample_cap(
    settings: &EstimatorSettings,
    n: usize,
    method: &'static str,
) -> Result<u64, EstimatorError> {
    if let Some(cap) = settings.sample_cap {
        return Ok(cap);
    }
    match settings.budget {
        Some(b) => Ok((4 * b).max(8 * n as u64)),
        None => Err(EstimatorError::Config(format!(
            "{method} with an unlimited budget needs an explicit sample_cap to terminate"
        ))),
    }
}

fn finish(
    oracle: &CaseOracle,
    settings: &EstimatorSettings,
    method: &'static str,
    acc: Vec<f64>,
    count: Vec<u64>,
    calls: u64,
) -> AttributionVector {
    let low_confidence = count.contains(&0);
    let scores = acc
        .iter()
        .zip(&count)
        .map(|(&a, &c)| if c == 0 { 0.0 } else { a / c as f64 })
        .collect();
    AttributionVector {
        case_id: oracle.case().case_id.clone(),
        method: method.into(),
        scores,
        budget: settings.budget,
        oracle_calls: calls,
        seed: settings.seed,
        low_confidence,
    }
}

/// Truncated Monte Carlo Shapley: sample document arrival orders, walk
/// each order accumulating marginal contributions, and stop scanning an
/// order early once the running utility is within
/// `tmc_truncation_tol * |v(D) - v(∅)|` of the full-context utility
/// (remaining documents in that order contribute zero). Runs until the
/// evaluation budget or the marginal-sample cap is exhausted; documents
/// that never received a sample score zero and flag the result.
pub fn tmc_shapley(
    oracle: &CaseOracle,
    settings: &EstimatorSettings,
) -> Result<AttributionVector, EstimatorError> {
    let n = oracle.n();
    let min = n as u64 + 2;
    if let Some(b) = settings.budget {
        if b < min {
            return Err(EstimatorError::BudgetTooSmall { method: "tmc", min, got: b });
        }
    }
    let cap = resolve_sample_cap(settings, n, "tmc")?;
    let mut session = Session::new(oracle, settings.budget);
    let empty = CoalitionMask::empty(n)?;
    let full = CoalitionMask::full(n)?;
    let v_empty = session.utility(empty)?;
    let v_full = session.utility(full)?;
    let threshold = settings.tmc_truncation_tol * (v_full - v_empty).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut acc = vec![0.0f64; n];
    let mut count = vec![0u64; n];
    let mut samples: u64 = 0;
    let mut order: Vec<usize> = (0..n).collect();

    'outer: while samples < cap {
        // Fisher-Yates shuffle, spelled out so the sampling stream is
        // owned by this crate.
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let mut prefix = empty;
        let mut prev = v_empty;
        let mut truncated = false;
        for &doc in &order {
            if samples >= cap {
                break 'outer;
            }
            prefix = prefix.with(doc)?;
            let marginal = if truncated {
                0.0
            } else if (prev - v_full).abs() < threshold {
                truncated = true;
                0.0
            } else {
                if !session.has(prefix) && session.would_exceed(&[prefix]) {
                    break 'outer;
                }
                let cur = session.utility(prefix)?;
                let m = cur - prev;
                prev = cur;
                m
            };
            acc[doc] += marginal;
            count[doc] += 1;
            samples += 1;
        }
    }

    Ok(finish(oracle, settings, "tmc", acc, count, session.calls()))
}

/// Probability mass of the Beta(α,β)-weighted coalition-size
/// distribution on {0..m}: p(s) ∝ C(m,s) · B(s+α, m−s+β) / B(α,β).
/// (α,β)=(1,1) is uniform over sizes; (0.5,0.5) is U-shaped.
pub fn beta_binomial_pmf(m: usize, alpha: f64, beta: f64) -> Vec<f64> {
    let ln_norm = ln_beta(alpha, beta);
    let ln_m1 = ln_gamma(m as f64 + 1.0);
    let mut pmf: Vec<f64> = (0..=m)
        .map(|s| {
            let ln_choose =
                ln_m1 - ln_gamma(s as f64 + 1.0) - ln_gamma((m - s) as f64 + 1.0);
            (ln_choose + ln_beta(s as f64 + alpha, (m - s) as f64 + beta) - ln_norm).exp()
        })
        .collect();
    let total: f64 = pmf.iter().sum();
    for p in &mut pmf {
        *p /= total;
    }
    pmf
}

fn cdf_of(pmf: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    pmf.iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn sample_from_cdf(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u <= c).unwrap_or(cdf.len() - 1)
}

/// Draw a uniform `s`-subset of `pool` by partial Fisher-Yates; returns
/// the chosen prefix. Mutates `pool` order (harmless: next call reshuffles).
fn draw_subset<'p>(rng: &mut ChaCha8Rng, pool: &'p mut [usize], s: usize) -> &'p [usize] {
    let len = pool.len();
    for i in 0..s {
        let j = rng.gen_range(i..len);
        pool.swap(i, j);
    }
    &pool[..s]
}

/// Beta-Shapley estimator: for each document j, repeatedly draw a
/// coalition size from the Beta(α,β) size weighting, a uniform coalition
/// of that size from the other documents, and average the marginal
/// contributions v(S∪{j}) − v(S). Drawing sizes from the semivalue's own
/// weighting makes the plain per-document mean the weighted estimate.
pub fn beta_shapley(
    oracle: &CaseOracle,
    settings: &EstimatorSettings,
) -> Result<AttributionVector, EstimatorError> {
    let n = oracle.n();
    if let Some(b) = settings.budget {
        if b < 2 {
            return Err(EstimatorError::BudgetTooSmall { method: "beta", min: 2, got: b });
        }
    }
    let cap = resolve_sample_cap(settings, n, "beta")?;
    let pmf = beta_binomial_pmf(n - 1, settings.beta_alpha, settings.beta_beta);
    let cdf = cdf_of(&pmf);
    let mut session = Session::new(oracle, settings.budget);
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut acc = vec![0.0f64; n];
    let mut count = vec![0u64; n];
    let mut samples: u64 = 0;
    let mut pool: Vec<usize> = Vec::with_capacity(n.saturating_sub(1));

    'outer: while samples < cap {
        for j in 0..n {
            if samples >= cap {
                break 'outer;
            }
            let s = sample_from_cdf(&cdf, rng.gen::<f64>());
            pool.clear();
            pool.extend((0..n).filter(|&i| i != j));
            let chosen = draw_subset(&mut rng, &mut pool, s);
            let without = CoalitionMask::from_indices(n, chosen)?;
            let with_j = without.with(j)?;
            if session.would_exceed(&[without, with_j]) {
                break 'outer;
            }
            let v_without = session.utility(without)?;
            let v_with = session.utility(with_j)?;
            acc[j] += v_with - v_without;
            count[j] += 1;
            samples += 1;
        }
    }

    Ok(finish(oracle, settings, "beta", acc, count, session.calls()))
}
