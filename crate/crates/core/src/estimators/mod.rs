//! Attribution estimators: exact Shapley values plus the budgeted
//! approximations (leave-one-out, truncated Monte Carlo, Beta-weighted
//! sampling, weighted-least-squares surrogates, and a sparse lasso
//! surrogate).
//!
//! All estimators run against a [`CaseOracle`] through a per-run
//! [`Session`] that deduplicates coalition requests and enforces the
//! evaluation budget. The budget counts *distinct coalitions this run
//! asks for*; whether a request is served from the persistent cache or
//! paid for at the scorer does not change the count, so reruns are
//! byte-identical no matter how warm the cache is.

mod exact;
mod sampling;
mod surrogate;

pub use exact::{exact_shapley, loo, EXACT_MAX_PLAYERS};
pub use sampling::{beta_binomial_pmf, beta_shapley, tmc_shapley};
pub use surrogate::{context_cite, kernel_shap, kernel_weight};

use crate::case::AttributionVector;
use crate::game::{CoalitionMask, GameError};
use crate::oracle::{CaseOracle, OracleError};
use crate::regress::RegressError;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("{method} needs a budget of at least {min} evaluations, got {got}")]
    BudgetTooSmall { method: &'static str, min: u64, got: u64 },
    #[error("evaluation budget exhausted mid-run")]
    BudgetExhausted,
    #[error("exhaustive computation over {n} documents would need 2^{n} evaluations; \
             the cap is {max} documents — use a budgeted estimator instead")]
    TooManyPlayers { n: usize, max: usize },
    #[error("estimator configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Regress(#[from] RegressError),
}

/// The attribution methods this crate implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Shapley,
    Loo,
    Tmc,
    Beta,
    KernelShap,
    ContextCite,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Shapley,
        Method::Loo,
        Method::Tmc,
        Method::Beta,
        Method::KernelShap,
        Method::ContextCite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Shapley => "shapley",
            Method::Loo => "loo",
            Method::Tmc => "tmc",
            Method::Beta => "beta",
            Method::KernelShap => "kernel_shap",
            Method::ContextCite => "context_cite",
        }
    }

    /// Whether the method's evaluation count is fixed by the case size
    /// rather than a caller-supplied budget.
    pub fn is_budget_free(self) -> bool {
        matches!(self, Method::Shapley | Method::Loo)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                format!("unknown method '{s}'; expected one of: {}", names.join(", "))
            })
    }
}

/// Tuning knobs shared by every estimator. Fields irrelevant to a given
/// method are ignored by it.
#[derive(Debug, Clone)]
pub struct EstimatorSettings {
    /// Maximum number of distinct coalition evaluations this run may
    /// request. `None` means unlimited (only meaningful for methods with
    /// a finite plan).
    pub budget: Option<u64>,
    pub seed: u64,
    /// Truncation threshold for the Monte Carlo scan, relative to
    /// |v(D) - v(∅)|. Zero disables truncation.
    pub tmc_truncation_tol: f64,
    pub beta_alpha: f64,
    pub beta_beta: f64,
    /// Fixed lasso penalty; `None` selects it by cross-validation.
    pub lasso_lambda: Option<f64>,
    /// Inclusion probability for the sparse surrogate's training masks.
    pub surrogate_mask_prob: f64,
    /// Stop sampling methods after this many marginal-contribution
    /// samples even if budget remains (they would otherwise loop forever
    /// once every coalition is memoized). `None` derives a cap from the
    /// budget.
    pub sample_cap: Option<u64>,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            budget: None,
            seed: 0,
            tmc_truncation_tol: 0.01,
            beta_alpha: 0.5,
            beta_beta: 0.5,
            lasso_lambda: None,
            surrogate_mask_prob: 0.5,
            sample_cap: None,
        }
    }
}

impl EstimatorSettings {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        if !self.tmc_truncation_tol.is_finite() || self.tmc_truncation_tol < 0.0 {
            return Err(EstimatorError::Config(
                "tmc_truncation_tol must be finite and non-negative".into(),
            ));
        }
        for (name, v) in [("beta_alpha", self.beta_alpha), ("beta_beta", self.beta_beta)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(EstimatorError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(l) = self.lasso_lambda {
            if !l.is_finite() || l < 0.0 {
                return Err(EstimatorError::Config(format!(
                    "lasso_lambda must be finite and non-negative, got {l}"
                )));
            }
        }
        if !self.surrogate_mask_prob.is_finite()
            || self.surrogate_mask_prob <= 0.0
            || self.surrogate_mask_prob >= 1.0
        {
            return Err(EstimatorError::Config(format!(
                "surrogate_mask_prob must lie strictly between 0 and 1, got {}",
                self.surrogate_mask_prob
            )));
        }
        if self.budget == Some(0) {
            return Err(EstimatorError::Config("budget must be positive".into()));
        }
        if self.sample_cap == Some(0) {
            return Err(EstimatorError::Config("sample_cap must be positive".into()));
        }
        Ok(())
    }
}

/// Per-run evaluation bookkeeping: memoizes every coalition the run has
/// requested and charges the budget once per distinct coalition.
pub(crate) struct Session<'o, 'a> {
    oracle: &'o CaseOracle<'a>,
    values: HashMap<u32, f64>,
    budget: Option<u64>,
}

impl<'o, 'a> Session<'o, 'a> {
    pub(crate) fn new(oracle: &'o CaseOracle<'a>, budget: Option<u64>) -> Self {
        Self { oracle, values: HashMap::new(), budget }
    }

    /// Distinct coalitions requested so far: the run's `oracle_calls`.
    pub(crate) fn calls(&self) -> u64 {
        self.values.len() as u64
    }

    pub(crate) fn has(&self, mask: CoalitionMask) -> bool {
        self.values.contains_key(&mask.bits())
    }

    /// Would evaluating these masks (counting only ones not yet seen,
    /// each once) blow the budget?
    pub(crate) fn would_exceed(&self, masks: &[CoalitionMask]) -> bool {
        let Some(budget) = self.budget else { return false };
        let mut fresh: u64 = 0;
        let mut seen = std::collections::HashSet::new();
        for m in masks {
            if !self.has(*m) && seen.insert(m.bits()) {
                fresh += 1;
            }
        }
        self.calls() + fresh > budget
    }

    pub(crate) fn utility(&mut self, mask: CoalitionMask) -> Result<f64, EstimatorError> {
        if let Some(&v) = self.values.get(&mask.bits()) {
            return Ok(v);
        }
        if let Some(budget) = self.budget {
            if self.calls() + 1 > budget {
                return Err(EstimatorError::BudgetExhausted);
            }
        }
        let v = self.oracle.utility(mask)?;
        self.values.insert(mask.bits(), v);
        Ok(v)
    }

    /// Evaluate a batch in plan order (possibly in parallel, which never
    /// changes the values). The whole batch must fit in the budget.
    pub(crate) fn evaluate_batch(&mut self, masks: &[CoalitionMask]) -> Result<(), EstimatorError> {
        if self.would_exceed(masks) {
            return Err(EstimatorError::BudgetExhausted);
        }
        let mut fresh = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for &m in masks {
            if !self.has(m) && seen.insert(m.bits()) {
                fresh.push(m);
            }
        }
        let values = self.oracle.evaluate_all(&fresh)?;
        for (m, v) in fresh.iter().zip(values) {
            self.values.insert(m.bits(), v);
        }
        Ok(())
    }

    /// Value previously requested through this session.
    pub(crate) fn cached(&self, mask: CoalitionMask) -> Option<f64> {
        self.values.get(&mask.bits()).copied()
    }
}

/// Run one attribution method end to end.
pub fn run_method(
    method: Method,
    oracle: &CaseOracle,
    settings: &EstimatorSettings,
) -> Result<AttributionVector, EstimatorError> {
    settings.validate()?;
    match method {
        Method::Shapley => exact_shapley(oracle, settings),
        Method::Loo => loo(oracle, settings),
        Method::Tmc => tmc_shapley(oracle, settings),
        Method::Beta => beta_shapley(oracle, settings),
        Method::KernelShap => kernel_shap(oracle, settings),
        Method::ContextCite => context_cite(oracle, settings),
    }
}
