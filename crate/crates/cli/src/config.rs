//! Layered run configuration: command-line flags override the optional
//! TOML config file, and built-in defaults fill whatever remains.
//!
//! The API credential never appears here or on the command line — the
//! config carries only the *name* of the environment variable that holds
//! it (`--credential-env` / `oracle.credential_env`).

use crate::CliError;
use ragshap::case::{QueryCase, ScenarioTag};
use ragshap::datasets::attach_synthetic_game;
use ragshap::estimators::Method;
use ragshap::oracle::remote::RemoteScorer;
use ragshap::oracle::synthetic::{GameSpec, SyntheticScorer};
use ragshap::oracle::{OracleConfig, OracleKind, Scorer, UtilityCache};
use serde::Deserialize;
use std::path::PathBuf;
use std::time::Duration;

pub fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

/// `--oracle` choices; the names match the config file's `oracle.kind`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleChoice {
    #[value(name = "remote_llm")]
    RemoteLlm,
    #[value(name = "synthetic")]
    Synthetic,
}

/// Flags shared by `attribute` and `experiment`.
#[derive(clap::Args, Debug, Default)]
pub struct SharedOpts {
    /// TOML config file; flags override its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Scoring backend.
    #[arg(long, value_enum)]
    pub oracle: Option<OracleChoice>,
    /// Base URL of the remote scoring endpoint.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Model identifier sent to the endpoint and stored in cache keys.
    #[arg(long)]
    pub model: Option<String>,
    /// Name of the environment variable holding the API credential. The
    /// secret itself is never accepted as a flag value.
    #[arg(long, value_name = "VAR")]
    pub credential_env: Option<String>,
    /// Comma-separated methods: shapley,loo,tmc,beta,kernel_shap,context_cite.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub methods: Option<Vec<Method>>,
    /// Comma-separated evaluation budgets for the budgeted methods.
    #[arg(long, value_delimiter = ',')]
    pub budgets: Option<Vec<u64>>,
    /// Comma-separated estimator seeds.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Comma-separated top-k cutoffs for precision metrics.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Utility cache file (JSONL, append-only); omitted = in-memory only.
    #[arg(long, value_name = "FILE")]
    pub cache: Option<PathBuf>,
    /// Output directory for artifacts and reports.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Concurrent oracle calls.
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Synthetic oracle: per-document base weights, a comma list matching
    /// the document count, or "zeros".
    #[arg(long, value_name = "LIST")]
    pub game_weights: Option<String>,
    /// Synthetic oracle: interaction strength for tagged scenario cases.
    #[arg(long)]
    pub pair_value: Option<f64>,
    /// Synthetic oracle: Gaussian noise scale added to utilities.
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Synthetic oracle: base noise seed, offset by the case's position.
    #[arg(long)]
    pub noise_seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    oracle: OracleSection,
    #[serde(default)]
    run: RunSection,
    #[serde(default)]
    game: GameSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleSection {
    kind: Option<String>,
    endpoint: Option<String>,
    model: Option<String>,
    credential_env: Option<String>,
    timeout_secs: Option<u64>,
    max_retries: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    methods: Option<Vec<String>>,
    budgets: Option<Vec<u64>>,
    seeds: Option<Vec<u64>>,
    ks: Option<Vec<usize>>,
    cache: Option<PathBuf>,
    out: Option<PathBuf>,
    parallelism: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameSection {
    weights: Option<Vec<f64>>,
    pair_value: Option<f64>,
    noise_sigma: Option<f64>,
    noise_seed: Option<u64>,
}

/// Base weights for synthetic games built from a case file.
#[derive(Debug, Clone)]
pub enum WeightsSpec {
    /// All-zero weights: pure interaction games for tagged cases.
    Zeros,
    /// Explicit weights; the length must match every case's document count.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct GameParams {
    pub weights: WeightsSpec,
    pub pair_value: f64,
    pub noise_sigma: f64,
    pub noise_seed: u64,
}

impl GameParams {
    fn weights_for(&self, case: &QueryCase) -> Result<Vec<f64>, CliError> {
        match &self.weights {
            WeightsSpec::Zeros => Ok(vec![0.0; case.n()]),
            WeightsSpec::Explicit(w) if w.len() == case.n() => Ok(w.clone()),
            WeightsSpec::Explicit(w) => Err(CliError::usage(format!(
                "--game-weights lists {} values but case '{}' has {} documents",
                w.len(),
                case.case_id,
                case.n()
            ))),
        }
    }
}

/// Everything a scoring command needs, after flag/file/default merging.
#[derive(Debug)]
pub struct RunConfig {
    pub oracle: OracleConfig,
    pub methods: Vec<Method>,
    pub budgets: Vec<u64>,
    pub seeds: Vec<u64>,
    pub ks: Vec<usize>,
    pub output_dir: PathBuf,
    pub parallelism: usize,
    pub game: GameParams,
}

fn parse_weights(raw: &str) -> Result<WeightsSpec, CliError> {
    if raw.trim() == "zeros" {
        return Ok(WeightsSpec::Zeros);
    }
    let parsed: Result<Vec<f64>, _> =
        raw.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match parsed {
        Ok(w) if !w.is_empty() => Ok(WeightsSpec::Explicit(w)),
        _ => Err(CliError::usage(format!(
            "--game-weights must be \"zeros\" or a comma-separated number list, got '{raw}'"
        ))),
    }
}

impl RunConfig {
    pub fn resolve(shared: &SharedOpts) -> Result<Self, CliError> {
        let file: FileConfig = match &shared.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::usage(format!("config file {}: {e}", path.display()))
                })?;
                toml::from_str(&text).map_err(|e| {
                    CliError::usage(format!("config file {}: {e}", path.display()))
                })?
            }
            None => FileConfig::default(),
        };

        let kind = match (shared.oracle, file.oracle.kind.as_deref()) {
            (Some(OracleChoice::RemoteLlm), _) => OracleKind::RemoteLlm,
            (Some(OracleChoice::Synthetic), _) => OracleKind::Synthetic,
            (None, Some("remote_llm")) => OracleKind::RemoteLlm,
            (None, Some("synthetic")) | (None, None) => OracleKind::Synthetic,
            (None, Some(other)) => {
                return Err(CliError::usage(format!(
                    "oracle.kind '{other}' is not one of: remote_llm, synthetic"
                )))
            }
        };
        let model_id = match shared.model.clone().or(file.oracle.model.clone()) {
            Some(m) => m,
            None if kind == OracleKind::Synthetic => "synthetic".into(),
            None => {
                return Err(CliError::usage(
                    "--model is required with --oracle remote_llm",
                ))
            }
        };
        let parallelism = shared
            .parallelism
            .or(file.run.parallelism)
            .unwrap_or(1)
            .max(1);
        let defaults = OracleConfig::default();
        let oracle = OracleConfig {
            kind,
            endpoint: shared.endpoint.clone().or(file.oracle.endpoint),
            model_id,
            credential_env: shared.credential_env.clone().or(file.oracle.credential_env),
            timeout: file
                .oracle
                .timeout_secs
                .map(Duration::from_secs)
                .unwrap_or(defaults.timeout),
            max_retries: file.oracle.max_retries.unwrap_or(defaults.max_retries),
            max_parallel: parallelism,
            cache_path: shared.cache.clone().or(file.run.cache),
            ..defaults
        };

        let methods = match (&shared.methods, &file.run.methods) {
            (Some(m), _) => m.clone(),
            (None, Some(names)) => names
                .iter()
                .map(|s| s.parse::<Method>())
                .collect::<Result<_, _>>()
                .map_err(CliError::usage)?,
            (None, None) => Method::ALL.to_vec(),
        };
        if methods.is_empty() {
            return Err(CliError::usage("at least one method is required"));
        }
        let budgets = shared
            .budgets
            .clone()
            .or(file.run.budgets)
            .unwrap_or_else(|| vec![32, 64, 100]);
        let seeds = shared.seeds.clone().or(file.run.seeds).unwrap_or_else(|| vec![0]);
        if seeds.is_empty() {
            return Err(CliError::usage("at least one seed is required"));
        }
        let ks = shared.k.clone().or(file.run.ks).unwrap_or_else(|| vec![1, 3, 5]);

        let weights = match &shared.game_weights {
            Some(raw) => parse_weights(raw)?,
            None => match file.game.weights {
                Some(w) => WeightsSpec::Explicit(w),
                None => WeightsSpec::Zeros,
            },
        };
        let game = GameParams {
            weights,
            pair_value: shared.pair_value.or(file.game.pair_value).unwrap_or(1.0),
            noise_sigma: shared.noise_sigma.or(file.game.noise_sigma).unwrap_or(0.0),
            noise_seed: shared.noise_seed.or(file.game.noise_seed).unwrap_or(0),
        };

        Ok(RunConfig {
            oracle,
            methods,
            budgets,
            seeds,
            ks,
            output_dir: shared
                .out
                .clone()
                .or(file.run.out)
                .unwrap_or_else(|| PathBuf::from("out")),
            parallelism,
            game,
        })
    }

    /// Open the configured cache file, or fall back to a process-local one.
    pub fn open_cache(&self) -> Result<UtilityCache, CliError> {
        match &self.oracle.cache_path {
            Some(path) => {
                let (cache, stats) = UtilityCache::open(path).map_err(crate::from_oracle)?;
                for line in &stats.corrupt_lines {
                    log::warn!("cache {}: skipped corrupt line {line}", path.display());
                }
                Ok(cache)
            }
            None => Ok(UtilityCache::in_memory()),
        }
    }

    /// Build the scoring backend: a remote client, or per-case synthetic
    /// games assembled from each case's scenario tag and the game flags.
    pub fn build_scorer(&self, cases: &[QueryCase]) -> Result<Box<dyn Scorer>, CliError> {
        match self.oracle.kind {
            OracleKind::RemoteLlm => {
                let scorer = RemoteScorer::from_config(&self.oracle).map_err(crate::from_oracle)?;
                Ok(Box::new(scorer))
            }
            OracleKind::Synthetic => {
                let mut scorer = SyntheticScorer::new();
                for (idx, case) in cases.iter().enumerate() {
                    let weights = self.game.weights_for(case)?;
                    let noise_seed = self.game.noise_seed.wrapping_add(idx as u64);
                    let spec = if case.scenario_tag == ScenarioTag::None {
                        let base = GameSpec::additive(weights).map_err(CliError::usage)?;
                        if self.game.noise_sigma != 0.0 {
                            base.with_noise(self.game.noise_sigma, noise_seed)
                                .map_err(CliError::usage)?
                        } else {
                            base
                        }
                    } else {
                        attach_synthetic_game(
                            case,
                            weights,
                            self.game.pair_value,
                            self.game.noise_sigma,
                            noise_seed,
                        )
                        .map_err(CliError::usage)?
                    };
                    scorer.insert(&case.case_id, spec);
                }
                Ok(Box::new(scorer))
            }
        }
    }
}
