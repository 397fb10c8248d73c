//! Utility oracles: the scoring backends that assign a value to a
//! coalition of documents, the per-case evaluation front end, and the
//! persistent cache that guarantees each coalition is paid for at most
//! once.

pub mod cache;
pub mod prompt;
pub mod remote;
pub mod synthetic;

use crate::case::QueryCase;
use crate::game::{CoalitionMask, GameError, MAX_PLAYERS};
use cache::CacheKey;
pub use cache::{CacheLoadStats, CacheScan, GroupStats, UtilityCache};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    /// Network-level failure after retries were exhausted.
    #[error("transport failure talking to the scoring endpoint: {0}")]
    Transport(String),
    /// The endpoint answered but cannot do what we need (no per-token
    /// log-probabilities, mismatched token/logprob arrays, ...).
    #[error("scoring endpoint cannot satisfy the request: {0}")]
    Capability(String),
    #[error("input too long for the scoring endpoint: {0}")]
    InputTooLong(String),
    #[error("oracle configuration: {0}")]
    Config(String),
    #[error("utility cache at {path}: {msg}")]
    Cache { path: String, msg: String },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Which scoring backend to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    RemoteLlm,
    Synthetic,
}

/// Everything needed to stand up an oracle. The API credential is looked
/// up from the environment variable named in `credential_env` at client
/// construction; the secret itself never appears in configs or caches.
#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub kind: OracleKind,
    pub endpoint: Option<String>,
    pub model_id: String,
    pub credential_env: Option<String>,
    pub timeout: Duration,
    pub max_retries: u32,
    pub backoff_base: Duration,
    pub max_parallel: usize,
    pub prompt_template: String,
    pub cache_path: Option<PathBuf>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            kind: OracleKind::Synthetic,
            endpoint: None,
            model_id: "synthetic".into(),
            credential_env: None,
            timeout: Duration::from_secs(30),
            max_retries: 3,
            backoff_base: Duration::from_millis(250),
            max_parallel: 1,
            prompt_template: prompt::DEFAULT_TEMPLATE.into(),
            cache_path: None,
        }
    }
}

/// A scored utility evaluation: the value plus how many continuation
/// tokens the endpoint scored (zero for synthetic games).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredUtility {
    pub value: f64,
    pub token_count: u32,
}

/// A scoring backend. Implementations must be safe to call from several
/// worker threads at once.
pub trait Scorer: Send + Sync {
    fn score(
        &self,
        case: &QueryCase,
        coalition: CoalitionMask,
    ) -> Result<ScoredUtility, OracleError>;
}

/// Utility oracle bound to one case and one model: routes every lookup
/// through the shared cache (so a coalition is computed at most once) and
/// counts how many evaluations actually reached the scorer.
pub struct CaseOracle<'a> {
    case: &'a QueryCase,
    scorer: &'a dyn Scorer,
    model_id: String,
    cache: &'a UtilityCache,
    max_parallel: usize,
    paid: AtomicU64,
}

impl<'a> CaseOracle<'a> {
    pub fn new(
        case: &'a QueryCase,
        scorer: &'a dyn Scorer,
        model_id: impl Into<String>,
        cache: &'a UtilityCache,
    ) -> Result<Self, OracleError> {
        let n = case.n();
        if n == 0 || n > MAX_PLAYERS {
            return Err(OracleError::Config(format!(
                "case '{}' has {n} documents; supported range is 1..={MAX_PLAYERS}",
                case.case_id
            )));
        }
        Ok(Self {
            case,
            scorer,
            model_id: model_id.into(),
            cache,
            max_parallel: 1,
            paid: AtomicU64::new(0),
        })
    }

    /// Allow up to `workers` concurrent scorer calls in [`Self::evaluate_all`].
    pub fn with_parallelism(mut self, workers: usize) -> Self {
        self.max_parallel = workers.max(1);
        self
    }

    pub fn case(&self) -> &QueryCase {
        self.case
    }

    pub fn n(&self) -> usize {
        self.case.n()
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    /// Number of evaluations that reached the underlying scorer (cache
    /// misses) through this oracle.
    pub fn scorer_invocations(&self) -> u64 {
        self.paid.load(Ordering::SeqCst)
    }

    /// Utility of one coalition, computed through the cache.
    pub fn utility(&self, coalition: CoalitionMask) -> Result<f64, OracleError> {
        if coalition.n() != self.n() {
            return Err(OracleError::Config(format!(
                "coalition over {} players queried against a {}-document case",
                coalition.n(),
                self.n()
            )));
        }
        let key = CacheKey {
            case_id: self.case.case_id.clone(),
            model_id: self.model_id.clone(),
            bits: coalition.bits(),
        };
        self.cache.get_or_compute(key, || {
            self.paid.fetch_add(1, Ordering::SeqCst);
            self.scorer.score(self.case, coalition)
        })
    }

    /// Evaluate a fixed plan of coalitions, possibly concurrently, and
    /// return the values in plan order. The result is independent of the
    /// worker count: concurrency only reorders the evaluations, never the
    /// reduction.
    pub fn evaluate_all(&self, plan: &[CoalitionMask]) -> Result<Vec<f64>, OracleError> {
        if self.max_parallel <= 1 || plan.len() < 2 {
            return plan.iter().map(|&m| self.utility(m)).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.max_parallel.min(plan.len()))
            .build()
            .map_err(|e| OracleError::Config(format!("worker pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            plan.par_iter().map(|&m| self.utility(m)).collect()
        })
    }
}
