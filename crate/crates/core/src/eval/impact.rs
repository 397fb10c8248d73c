//! Exhaustive impact sets: the k-subset of documents whose joint removal
//! hurts the response utility the most, found by brute force.

use super::EvalError;
use crate::game::{enumerate_k_subsets, CoalitionMask};
use crate::oracle::CaseOracle;

/// Largest case the exhaustive search will accept.
pub const IMPACT_MAX_PLAYERS: usize = 20;

/// The maximizing k-subset for one case: removing `members` from the full
/// context drops the utility by `drop`, and no other k-subset drops it
/// more.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactSet {
    pub case_id: String,
    pub k: usize,
    pub members: CoalitionMask,
    pub drop: f64,
}

impl ImpactSet {
    pub fn member_indices(&self) -> Vec<usize> {
        self.members.members().collect()
    }
}

/// Evaluate v(D \ S) for every k-subset S and return the subset with the
/// largest utility drop. Ties go to the smallest mask integer, i.e. the
/// first subset in ascending enumeration order.
pub fn exhaustive_impact_set(oracle: &CaseOracle, k: usize) -> Result<ImpactSet, EvalError> {
    let n = oracle.n();
    if n > IMPACT_MAX_PLAYERS {
        return Err(EvalError::TooManyPlayers { n, max: IMPACT_MAX_PLAYERS });
    }
    if k == 0 || k > n {
        return Err(EvalError::Input(format!("k={k} out of range for {n} documents")));
    }
    let full = CoalitionMask::full(n)?;
    let subsets: Vec<CoalitionMask> = enumerate_k_subsets(n, k)?.collect();
    let mut plan = Vec::with_capacity(subsets.len() + 1);
    plan.push(full);
    for s in &subsets {
        plan.push(CoalitionMask::from_bits(n, full.bits() & !s.bits())?);
    }
    let values = oracle.evaluate_all(&plan)?;
    let v_full = values[0];
    let mut best_idx = 0usize;
    let mut best_drop = f64::NEG_INFINITY;
    for (i, &v_without) in values[1..].iter().enumerate() {
        let drop = v_full - v_without;
        // Strict improvement keeps the earliest (smallest-mask) subset on
        // ties.
        if drop > best_drop {
            best_drop = drop;
            best_idx = i;
        }
    }
    Ok(ImpactSet {
        case_id: oracle.case().case_id.clone(),
        k,
        members: subsets[best_idx],
        drop: best_drop,
    })
}
