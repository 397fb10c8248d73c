//! HTTP client for a log-probability scoring endpoint.
//!
//! Wire contract: `POST {base}/score` with `{"model", "prompt",
//! "continuation"}` returns `{"tokens": [...], "logprobs": [...]}` of
//! equal length, each logprob finite and non-positive; the utility is
//! the sum. `POST {base}/generate` with `{"model", "prompt",
//! "temperature", "max_tokens"}` returns `{"text"}` and is used once per
//! case to freeze the response being attributed.
//!
//! Transient failures (transport errors, HTTP 5xx, 429) are retried with
//! exponential backoff; anything else fails fast. The API credential is
//! read from the environment variable named in the config and sent as a
//! bearer token; it is never logged or written to disk.

use super::prompt::build_prompt;
use super::{OracleConfig, OracleError, OracleKind, ScoredUtility, Scorer};
use crate::case::QueryCase;
use crate::game::CoalitionMask;
use serde::{Deserialize, Serialize};
use std::time::Duration;

#[derive(Serialize)]
struct ScoreRequest<'a> {
    model: &'a str,
    prompt: &'a str,
    continuation: &'a str,
}

#[derive(Deserialize)]
pub struct ScoreResponse {
    pub tokens: Vec<String>,
    pub logprobs: Vec<f64>,
}

#[derive(Serialize)]
struct GenerateRequest<'a> {
    model: &'a str,
    prompt: &'a str,
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct GenerateResponse {
    text: String,
}

const GENERATE_MAX_TOKENS: u32 = 512;

pub struct RemoteScorer {
    base: String,
    model: String,
    template: String,
    client: reqwest::blocking::Client,
    bearer: Option<String>,
    max_retries: u32,
    backoff_base: Duration,
}

// Hand-written so the credential can never leak through debug logging;
// only its presence is shown.
impl std::fmt::Debug for RemoteScorer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteScorer")
            .field("base", &self.base)
            .field("model", &self.model)
            .field("template", &self.template)
            .field("bearer", &self.bearer.as_ref().map(|_| "<redacted>"))
            .field("max_retries", &self.max_retries)
            .field("backoff_base", &self.backoff_base)
            .finish()
    }
}

impl RemoteScorer {
    pub fn from_config(config: &OracleConfig) -> Result<Self, OracleError> {
        if config.kind != OracleKind::RemoteLlm {
            return Err(OracleError::Config(
                "remote scorer requires an oracle config of kind remote_llm".into(),
            ));
        }
        let endpoint = config
            .endpoint
            .as_deref()
            .ok_or_else(|| OracleError::Config("remote oracle needs an endpoint URL".into()))?;
        let bearer = match &config.credential_env {
            None => None,
            Some(var) => Some(std::env::var(var).map_err(|_| {
                OracleError::Config(format!(
                    "credential environment variable '{var}' is not set"
                ))
            })?),
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| OracleError::Config(format!("http client: {e}")))?;
        Ok(Self {
            base: endpoint.trim_end_matches('/').to_string(),
            model: config.model_id.clone(),
            template: config.prompt_template.clone(),
            client,
            bearer,
            max_retries: config.max_retries,
            backoff_base: config.backoff_base,
        })
    }

    fn post_json<B: Serialize, R: for<'de> Deserialize<'de>>(
        &self,
        url: &str,
        body: &B,
    ) -> Result<R, OracleError> {
        let mut attempt = 0u32;
        loop {
            let mut req = self.client.post(url).json(body);
            if let Some(token) = &self.bearer {
                req = req.bearer_auth(token);
            }
            let outcome = req.send();
            let retryable_msg = match outcome {
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        return resp.json::<R>().map_err(|e| {
                            OracleError::Capability(format!(
                                "endpoint returned a malformed body: {e}"
                            ))
                        });
                    }
                    let body_snippet: String =
                        resp.text().unwrap_or_default().chars().take(200).collect();
                    if status.as_u16() == 413 {
                        return Err(OracleError::InputTooLong(format!(
                            "endpoint rejected the request as too large: {body_snippet}"
                        )));
                    }
                    if status.is_server_error() || status.as_u16() == 429 {
                        format!("HTTP {status}: {body_snippet}")
                    } else {
                        return Err(OracleError::Config(format!(
                            "endpoint rejected the request with HTTP {status}: {body_snippet}"
                        )));
                    }
                }
                Err(e) => format!("transport: {e}"),
            };
            if attempt >= self.max_retries {
                return Err(OracleError::Transport(format!(
                    "giving up after {} attempts ({retryable_msg})",
                    attempt + 1
                )));
            }
            let backoff = self.backoff_base.saturating_mul(1u32 << attempt.min(16));
            log::warn!("retrying {url} after {retryable_msg} (backoff {backoff:?})");
            std::thread::sleep(backoff);
            attempt += 1;
        }
    }

    pub fn generate(&self, prompt: &str) -> Result<String, OracleError> {
        let url = format!("{}/generate", self.base);
        let resp: GenerateResponse = self.post_json(
            &url,
            &GenerateRequest {
                model: &self.model,
                prompt,
                temperature: 0.0,
                max_tokens: GENERATE_MAX_TOKENS,
            },
        )?;
        if resp.text.is_empty() {
            return Err(OracleError::Capability("endpoint generated an empty response".into()));
        }
        Ok(resp.text)
    }
}

/// Validate a score response and reduce it to a utility: the sum of the
/// continuation's token log-probabilities.
pub fn score_from_response(resp: &ScoreResponse) -> Result<ScoredUtility, OracleError> {
    if resp.tokens.len() != resp.logprobs.len() {
        return Err(OracleError::Capability(format!(
            "endpoint returned {} tokens but {} logprobs",
            resp.tokens.len(),
            resp.logprobs.len()
        )));
    }
    if resp.logprobs.is_empty() {
        return Err(OracleError::Capability("endpoint scored zero tokens".into()));
    }
    for &lp in &resp.logprobs {
        if !lp.is_finite() || lp > 0.0 {
            return Err(OracleError::Capability(format!(
                "log-probabilities must be finite and non-positive, got {lp}"
            )));
        }
    }
    Ok(ScoredUtility {
        value: resp.logprobs.iter().sum(),
        token_count: resp.logprobs.len() as u32,
    })
}

impl Scorer for RemoteScorer {
    fn score(
        &self,
        case: &QueryCase,
        coalition: CoalitionMask,
    ) -> Result<ScoredUtility, OracleError> {
        let target = case.target_response.as_deref().ok_or_else(|| {
            OracleError::Config(format!(
                "case '{}' has no target response to score; generate one first",
                case.case_id
            ))
        })?;
        let prompt = build_prompt(case, coalition, &self.template)?;
        let url = format!("{}/score", self.base);
        let resp: ScoreResponse = self.post_json(
            &url,
            &ScoreRequest { model: &self.model, prompt: &prompt, continuation: target },
        )?;
        score_from_response(&resp)
    }
}

/// Resolve the response to attribute for a case: an existing
/// `target_response` is used verbatim (no network traffic); otherwise the
/// model generates one greedily from the full-context prompt.
pub fn generate_target_response(
    case: &QueryCase,
    config: &OracleConfig,
) -> Result<String, OracleError> {
    if let Some(existing) = &case.target_response {
        return Ok(existing.clone());
    }
    match config.kind {
        OracleKind::Synthetic => Err(OracleError::Capability(format!(
            "case '{}' has no target response and synthetic oracles cannot generate text",
            case.case_id
        ))),
        OracleKind::RemoteLlm => {
            let scorer = RemoteScorer::from_config(config)?;
            let full = CoalitionMask::full(case.n())?;
            let prompt = build_prompt(case, full, &config.prompt_template)?;
            scorer.generate(&prompt)
        }
    }
}
