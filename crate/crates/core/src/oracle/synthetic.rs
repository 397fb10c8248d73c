//! Synthetic cooperative games with known structure.
//!
//! These stand in for the expensive language-model utility during tests
//! and calibration runs. Each game is additive in per-document weights
//! plus an optional two-document interaction, with optional Gaussian
//! noise that is a pure function of `(noise_seed, coalition)` — so a
//! noisy game is still a deterministic function and can be cached,
//! replayed, and evaluated in any order.

use super::{OracleError, ScoredUtility, Scorer};
use crate::case::QueryCase;
use crate::game::{CoalitionMask, MAX_PLAYERS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// How the designated pair of documents interacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    /// No interaction: v(S) is a plain sum of member weights.
    Additive,
    /// Either pair member alone already yields the full bonus.
    Redundancy,
    /// Each pair member contributes half the bonus independently.
    Complementarity,
    /// The bonus appears only when both members are present.
    Synergy,
}

impl GameKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GameKind::Additive => "additive",
            GameKind::Redundancy => "redundancy",
            GameKind::Complementarity => "complementarity",
            GameKind::Synergy => "synergy",
        }
    }
}

/// A fully specified synthetic game over `n` documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub kind: GameKind,
    pub n: usize,
    /// Per-document additive weights; for non-additive kinds the two
    /// pair positions must carry weight zero so the interaction term is
    /// the pair's only contribution.
    pub weights: Vec<f64>,
    pub pair: Option<(usize, usize)>,
    pub pair_value: f64,
    pub noise_sigma: f64,
    pub noise_seed: u64,
}

impl GameSpec {
    /// A noiseless additive game.
    pub fn additive(weights: Vec<f64>) -> Result<Self, OracleError> {
        let spec = Self {
            kind: GameKind::Additive,
            n: weights.len(),
            weights,
            pair: None,
            pair_value: 0.0,
            noise_sigma: 0.0,
            noise_seed: 0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A noiseless game with a two-document interaction.
    pub fn interaction(
        kind: GameKind,
        weights: Vec<f64>,
        pair: (usize, usize),
        pair_value: f64,
    ) -> Result<Self, OracleError> {
        if kind == GameKind::Additive {
            return Err(OracleError::Config(
                "additive games take no interaction pair; use GameSpec::additive".into(),
            ));
        }
        let spec = Self {
            kind,
            n: weights.len(),
            weights,
            pair: Some(pair),
            pair_value,
            noise_sigma: 0.0,
            noise_seed: 0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Add coalition-keyed Gaussian noise with standard deviation `sigma`.
    pub fn with_noise(mut self, sigma: f64, seed: u64) -> Result<Self, OracleError> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(OracleError::Config(format!(
                "noise sigma must be finite and non-negative, got {sigma}"
            )));
        }
        self.noise_sigma = sigma;
        self.noise_seed = seed;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.n == 0 || self.n > MAX_PLAYERS {
            return Err(OracleError::Config(format!(
                "game size {} outside supported range 1..={MAX_PLAYERS}",
                self.n
            )));
        }
        if self.weights.len() != self.n {
            return Err(OracleError::Config(format!(
                "game declares n={} but has {} weights",
                self.n,
                self.weights.len()
            )));
        }
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(OracleError::Config("game weights must be finite".into()));
        }
        if !self.pair_value.is_finite() {
            return Err(OracleError::Config("pair_value must be finite".into()));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(OracleError::Config("noise sigma must be finite and non-negative".into()));
        }
        match (self.kind, self.pair) {
            (GameKind::Additive, None) => {}
            (GameKind::Additive, Some(_)) => {
                return Err(OracleError::Config("additive games take no interaction pair".into()))
            }
            (_, None) => {
                return Err(OracleError::Config(format!(
                    "{} games need an interaction pair",
                    self.kind.as_str()
                )))
            }
            (_, Some((a, b))) => {
                if a >= self.n || b >= self.n {
                    return Err(OracleError::Config(format!(
                        "pair ({a}, {b}) out of range for n={}",
                        self.n
                    )));
                }
                if a == b {
                    return Err(OracleError::Config("pair members must be distinct".into()));
                }
                if self.weights[a] != 0.0 || self.weights[b] != 0.0 {
                    return Err(OracleError::Config(
                        "pair positions must carry weight zero in non-additive games; \
                         the interaction term is their whole contribution"
                            .into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Clean (noise-free) value of a coalition.
    pub fn clean_value(&self, coalition: CoalitionMask) -> f64 {
        assert_eq!(
            coalition.n(),
            self.n,
            "coalition width does not match game size"
        );
        let mut v: f64 = coalition.members().map(|i| self.weights[i]).sum();
        if let Some((a, b)) = self.pair {
            let has_a = coalition.contains(a);
            let has_b = coalition.contains(b);
            v += match self.kind {
                GameKind::Additive => 0.0,
                GameKind::Redundancy => {
                    if has_a || has_b {
                        self.pair_value
                    } else {
                        0.0
                    }
                }
                GameKind::Complementarity => {
                    0.5 * self.pair_value * (u8::from(has_a) + u8::from(has_b)) as f64
                }
                GameKind::Synergy => {
                    if has_a && has_b {
                        self.pair_value
                    } else {
                        0.0
                    }
                }
            };
        }
        v
    }

    /// Value including the coalition-keyed noise term.
    pub fn value(&self, coalition: CoalitionMask) -> f64 {
        let mut v = self.clean_value(coalition);
        if self.noise_sigma > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(mix64(self.noise_seed, coalition.bits()));
            let z: f64 = StandardNormal.sample(&mut rng);
            v += self.noise_sigma * z;
        }
        v
    }

    /// Exact attribution scores for the noise-free game, derivable from
    /// the structure: each document gets its own weight, and for any
    /// interaction kind the bonus splits evenly over the pair (the two
    /// members are interchangeable, and documents outside the pair never
    /// change the bonus).
    pub fn exact_scores(&self) -> Vec<f64> {
        let mut phi = self.weights.clone();
        if self.kind != GameKind::Additive {
            if let Some((a, b)) = self.pair {
                phi[a] += 0.5 * self.pair_value;
                phi[b] += 0.5 * self.pair_value;
            }
        }
        phi
    }
}

/// Mix a seed and a coalition into one RNG seed (splitmix64 finalizer),
/// so each coalition draws an independent, reproducible noise value.
fn mix64(seed: u64, bits: u32) -> u64 {
    let mut z = seed ^ u64::from(bits).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Scorer backed by a table of synthetic games, one per case id.
#[derive(Default)]
pub struct SyntheticScorer {
    games: HashMap<String, GameSpec>,
}

impl SyntheticScorer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(case_id: impl Into<String>, spec: GameSpec) -> Self {
        let mut s = Self::new();
        s.insert(case_id, spec);
        s
    }

    pub fn insert(&mut self, case_id: impl Into<String>, spec: GameSpec) {
        self.games.insert(case_id.into(), spec);
    }

    pub fn get(&self, case_id: &str) -> Option<&GameSpec> {
        self.games.get(case_id)
    }
}

impl Scorer for SyntheticScorer {
    fn score(
        &self,
        case: &QueryCase,
        coalition: CoalitionMask,
    ) -> Result<ScoredUtility, OracleError> {
        let spec = self.games.get(&case.case_id).ok_or_else(|| {
            OracleError::Config(format!("no synthetic game registered for case '{}'", case.case_id))
        })?;
        if spec.n != case.n() {
            return Err(OracleError::Config(format!(
                "synthetic game for case '{}' covers {} documents but the case has {}",
                case.case_id,
                spec.n,
                case.n()
            )));
        }
        Ok(ScoredUtility { value: spec.value(coalition), token_count: 0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn mask(n: usize, idx: &[usize]) -> CoalitionMask {
        CoalitionMask::from_indices(n, idx).unwrap()
    }

    #[test]
    fn additive_value_is_the_member_weight_sum() {
        let g = GameSpec::additive(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(g.value(mask(3, &[])), 0.0);
        assert_eq!(g.value(mask(3, &[0, 2])), 4.0);
        assert_eq!(g.value(mask(3, &[0, 1, 2])), 6.0);
    }

    #[test]
    fn interaction_kinds_follow_their_definitions() {
        let w = vec![0.0, 0.0, 0.5];
        let r = 1.0;
        let red = GameSpec::interaction(GameKind::Redundancy, w.clone(), (0, 1), r).unwrap();
        let comp = GameSpec::interaction(GameKind::Complementarity, w.clone(), (0, 1), r).unwrap();
        let syn = GameSpec::interaction(GameKind::Synergy, w, (0, 1), r).unwrap();

        // Neither member present: only the background weight contributes.
        for g in [&red, &comp, &syn] {
            assert_eq!(g.value(mask(3, &[2])), 0.5);
        }
        // One member present.
        assert_eq!(red.value(mask(3, &[0])), 1.0);
        assert_eq!(comp.value(mask(3, &[0])), 0.5);
        assert_eq!(syn.value(mask(3, &[0])), 0.0);
        // Both members present: every kind pays the full bonus.
        for g in [&red, &comp, &syn] {
            assert_eq!(g.value(mask(3, &[0, 1])), 1.0);
        }
    }

    #[test]
    fn exact_scores_split_the_bonus_evenly() {
        let g =
            GameSpec::interaction(GameKind::Synergy, vec![0.0, 0.0, 2.0], (0, 1), 3.0).unwrap();
        assert_eq!(g.exact_scores(), vec![1.5, 1.5, 2.0]);
        let a = GameSpec::additive(vec![1.0, 4.0]).unwrap();
        assert_eq!(a.exact_scores(), vec![1.0, 4.0]);
    }

    #[test]
    fn pair_positions_must_have_zero_weight() {
        let err =
            GameSpec::interaction(GameKind::Synergy, vec![0.1, 0.0, 1.0], (0, 1), 2.0).unwrap_err();
        assert!(err.to_string().contains("weight zero"));
    }

    #[test]
    fn degenerate_pairs_are_rejected() {
        assert!(GameSpec::interaction(GameKind::Redundancy, vec![0.0, 0.0], (0, 0), 1.0).is_err());
        assert!(GameSpec::interaction(GameKind::Redundancy, vec![0.0, 0.0], (0, 5), 1.0).is_err());
    }

    #[test]
    fn noise_is_deterministic_per_coalition() {
        let g = GameSpec::additive(vec![1.0; 4])
            .unwrap()
            .with_noise(0.3, 42)
            .unwrap();
        let m = mask(4, &[1, 3]);
        assert_eq!(g.value(m), g.value(m), "same coalition, same noise");
        let other = mask(4, &[0, 1]);
        assert_ne!(g.value(m) - 2.0, g.value(other) - 2.0, "distinct coalitions draw distinct noise");
        let reseeded = GameSpec::additive(vec![1.0; 4]).unwrap().with_noise(0.3, 43).unwrap();
        assert_ne!(g.value(m), reseeded.value(m), "seed changes the draw");
    }

    #[test]
    fn noise_has_roughly_the_requested_scale() {
        let g = GameSpec::additive(vec![0.0; 10]).unwrap().with_noise(1.0, 7).unwrap();
        let masks: Vec<CoalitionMask> = crate::game::enumerate_coalitions(10).unwrap().collect();
        let draws: Vec<f64> = masks.iter().map(|&m| g.value(m) - g.clean_value(m)).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var =
            draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / draws.len() as f64;
        assert_abs_diff_eq!(mean, 0.0, epsilon = 0.05);
        assert_abs_diff_eq!(var, 1.0, epsilon = 0.1);
    }

    #[test]
    fn scorer_looks_up_by_case_id() {
        let case = crate::oracle::tests::toy_case("g1", 3);
        let scorer =
            SyntheticScorer::single("g1", GameSpec::additive(vec![1.0, 2.0, 3.0]).unwrap());
        let got = scorer.score(&case, mask(3, &[1, 2])).unwrap();
        assert_eq!(got.value, 5.0);
        assert_eq!(got.token_count, 0);

        let other = crate::oracle::tests::toy_case("missing", 3);
        assert!(matches!(scorer.score(&other, mask(3, &[])), Err(OracleError::Config(_))));
    }

    #[test]
    fn scorer_rejects_size_mismatch() {
        let case = crate::oracle::tests::toy_case("g2", 4);
        let scorer = SyntheticScorer::single("g2", GameSpec::additive(vec![1.0; 3]).unwrap());
        let err = scorer.score(&case, mask(4, &[0])).unwrap_err();
        assert!(err.to_string().contains("3 documents"));
    }

    proptest! {
        /// With non-negative weights and no noise, every kind of game is
        /// monotone: adding documents never lowers the value.
        #[test]
        fn nonnegative_games_are_monotone(
            n in 2usize..8,
            kind_pick in 0usize..4,
            raw_weights in proptest::collection::vec(0.0f64..3.0, 8),
            pair_value in 0.0f64..4.0,
            sub_bits in any::<u32>(),
            extra_bits in any::<u32>(),
        ) {
            let kind = [GameKind::Additive, GameKind::Redundancy,
                        GameKind::Complementarity, GameKind::Synergy][kind_pick];
            let mut weights = raw_weights[..n].to_vec();
            let spec = if kind == GameKind::Additive {
                GameSpec::additive(weights).unwrap()
            } else {
                weights[0] = 0.0;
                weights[1] = 0.0;
                GameSpec::interaction(kind, weights, (0, 1), pair_value).unwrap()
            };
            let all = (1u32 << n) - 1;
            let small = CoalitionMask::from_bits(n, sub_bits & extra_bits & all).unwrap();
            let big = CoalitionMask::from_bits(n, (sub_bits & all) | small.bits()).unwrap();
            prop_assert!(spec.value(small) <= spec.value(big) + 1e-12);
        }

        /// The exact scores always sum to the grand-coalition value minus
        /// the empty value (both are noise-free here).
        #[test]
        fn exact_scores_are_efficient(
            n in 2usize..8,
            kind_pick in 0usize..4,
            raw_weights in proptest::collection::vec(-2.0f64..3.0, 8),
            pair_value in -2.0f64..4.0,
        ) {
            let kind = [GameKind::Additive, GameKind::Redundancy,
                        GameKind::Complementarity, GameKind::Synergy][kind_pick];
            let mut weights = raw_weights[..n].to_vec();
            let spec = if kind == GameKind::Additive {
                GameSpec::additive(weights).unwrap()
            } else {
                weights[0] = 0.0;
                weights[1] = 0.0;
                GameSpec::interaction(kind, weights, (0, 1), pair_value).unwrap()
            };
            let full = CoalitionMask::full(n).unwrap();
            let empty = CoalitionMask::empty(n).unwrap();
            let total: f64 = spec.exact_scores().iter().sum();
            prop_assert!((total - (spec.value(full) - spec.value(empty))).abs() < 1e-9);
        }
    }

    #[test]
    fn spec_round_trips_through_json() {
        let g = GameSpec::interaction(GameKind::Complementarity, vec![0.0, 0.0, 1.5], (0, 1), 2.0)
            .unwrap()
            .with_noise(0.1, 99)
            .unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.contains("\"complementarity\""));
        let back: GameSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }
}
