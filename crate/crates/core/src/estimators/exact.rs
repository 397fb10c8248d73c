//! Exact attribution: full Shapley values by coalition enumeration, and
//! the leave-one-out baseline.

use super::{EstimatorError, EstimatorSettings, Session};
use crate::case::AttributionVector;
use crate::game::{shapley_weight, CoalitionMask};
use crate::oracle::CaseOracle;

/// Largest case an exhaustive estimator will accept: 2^20 evaluations is
/// the most an exact run is allowed to plan.
pub const EXACT_MAX_PLAYERS: usize = 20;

/// Exact Shapley values: evaluates all 2^n coalitions, then accumulates
/// each document's weighted marginal contribution over every coalition
/// not containing it.
pub fn exact_shapley(
    oracle: &CaseOracle,
    settings: &EstimatorSettings,
) -> Result<AttributionVector, EstimatorError> {
    let n = oracle.n();
    if n > EXACT_MAX_PLAYERS {
        return Err(EstimatorError::TooManyPlayers { n, max: EXACT_MAX_PLAYERS });
    }
    let plan: Vec<CoalitionMask> = crate::game::enumerate_coalitions(n)?.collect();
    let mut session = Session::new(oracle, settings.budget);
    session.evaluate_batch(&plan)?;

    // Dense value table indexed by mask bits.
    let mut v = vec![0.0f64; 1usize << n];
    for &mask in &plan {
        v[mask.bits() as usize] = session.cached(mask).expect("evaluated above");
    }
    let weights: Vec<f64> = (0..n)
        .map(|s| shapley_weight(n, s))
        .collect::<Result<_, _>>()?;

    let mut phi = vec![0.0f64; n];
    for bits in 0..(1u32 << n) {
        let s = bits.count_ones() as usize;
        let base = v[bits as usize];
        for (j, phi_j) in phi.iter_mut().enumerate() {
            if bits & (1 << j) == 0 {
                *phi_j += weights[s] * (v[(bits | (1 << j)) as usize] - base);
            }
        }
    }

    Ok(AttributionVector {
        case_id: oracle.case().case_id.clone(),
        method: "shapley".into(),
        scores: phi,
        budget: settings.budget,
        oracle_calls: session.calls(),
        seed: settings.seed,
        low_confidence: false,
    })
}

/// Leave-one-out attribution: each document scores the utility drop from
/// removing it from the full context. Costs exactly n + 1 evaluations.
pub fn loo(
    oracle: &CaseOracle,
    settings: &EstimatorSettings,
) -> Result<AttributionVector, EstimatorError> {
    let n = oracle.n();
    let full = CoalitionMask::full(n)?;
    let mut plan = vec![full];
    for j in 0..n {
        plan.push(full.without(j)?);
    }
    let mut session = Session::new(oracle, settings.budget);
    session.evaluate_batch(&plan)?;
    let v_full = session.cached(full).expect("evaluated above");
    let scores: Vec<f64> = (0..n)
        .map(|j| v_full - session.cached(plan[j + 1]).expect("evaluated above"))
        .collect();

    Ok(AttributionVector {
        case_id: oracle.case().case_id.clone(),
        method: "loo".into(),
        scores,
        budget: settings.budget,
        oracle_calls: session.calls(),
        seed: settings.seed,
        low_confidence: false,
    })
}
