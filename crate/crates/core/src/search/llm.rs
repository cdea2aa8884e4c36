//! Candidate generation through an HTTP chat-completion endpoint.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::GenError;
use crate::expr::{extract_sexpr, FeatureId};
use crate::types::{AlgorithmSpec, ScoredAlgorithm};

pub const DEFAULT_TOKEN_ENV: &str = "BEHAVESIM_LLM_TOKEN";

fn default_token_env() -> String {
    DEFAULT_TOKEN_ENV.to_string()
}

fn default_retries() -> usize {
    3
}

fn default_timeout() -> f64 {
    120.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmConfig {
    /// Full URL the chat request is posted to.
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the bearer token.
    #[serde(default = "default_token_env")]
    pub token_env: String,
    /// Extra attempts per query after an HTTP or parse failure.
    #[serde(default = "default_retries")]
    pub max_retries: usize,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
}

pub struct LlmClient {
    cfg: LlmConfig,
    token: String,
    agent: ureq::Agent,
}

impl std::fmt::Debug for LlmClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LlmClient").field("cfg", &self.cfg).finish_non_exhaustive()
    }
}

/// What a single query produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub spec: Option<AlgorithmSpec>,
    pub parse_failures: usize,
}

impl LlmClient {
    /// Fails when the token variable is unset, before anything is sent.
    pub fn new(cfg: LlmConfig) -> Result<Self, GenError> {
        let token = std::env::var(&cfg.token_env)
            .map_err(|_| GenError::Unavailable(format!("environment variable {} is not set", cfg.token_env)))?;
        let secs = if cfg.timeout_secs.is_finite() && cfg.timeout_secs > 0.0 { cfg.timeout_secs } else { default_timeout() };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(secs)))
            .build()
            .into();
        Ok(LlmClient { cfg, token, agent })
    }

    fn post(&self, prompt: &str) -> Result<String, String> {
        let body = json!({
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": prompt}],
        });
        let mut resp = self
            .agent
            .post(&self.cfg.endpoint)
            .header("Authorization", format!("Bearer {}", self.token))
            .send_json(&body)
            .map_err(|e| e.to_string())?;
        let v: Value = resp.body_mut().read_json().map_err(|e| e.to_string())?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| "response has no choices[0].message.content".to_string())
    }

    /// One query with retries. HTTP failures on every attempt make the
    /// generator unavailable; unparseable replies are counted and retried.
    pub fn query(&self, prompt: &str) -> Result<Reply, GenError> {
        let mut parse_failures = 0;
        let mut http_ok = false;
        let mut last_err = String::new();
        for attempt in 0..=self.cfg.max_retries {
            match self.post(prompt) {
                Ok(text) => {
                    http_ok = true;
                    match extract_sexpr(&text) {
                        Ok(expr) => {
                            return Ok(Reply {
                                spec: Some(AlgorithmSpec::dsl(expr)),
                                parse_failures,
                            })
                        }
                        Err(e) => {
                            log::debug!("attempt {attempt}: unparseable reply: {e}");
                            parse_failures += 1;
                        }
                    }
                }
                Err(e) => {
                    log::warn!("attempt {attempt}: request failed: {e}");
                    last_err = e;
                }
            }
        }
        if http_ok {
            Ok(Reply { spec: None, parse_failures })
        } else {
            Err(GenError::Unavailable(last_err))
        }
    }
}

/// Prompt embedding the parents worst first, so each example improves on
/// the one before it.
pub fn render_prompt(parents: &[&ScoredAlgorithm]) -> String {
    let mut sorted: Vec<&ScoredAlgorithm> = parents.to_vec();
    sorted.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
    let features: Vec<&str> = FeatureId::ALL.iter().map(|f| f.name()).collect();
    let mut p = String::new();
    p.push_str(
        "We build a TSP tour step by step. At every step each unvisited city gets a score \
         and the city with the lowest score is visited next. A score is an S-expression:\n\
         (const <number>) | (feat <name>) | (<unary> <expr>) | (<binary> <expr> <expr>)\n\
         unary: neg abs sqrt_safe log1p_safe\n\
         binary: add sub mul div_safe min max\n",
    );
    p.push_str(&format!("features: {}\n\n", features.join(" ")));
    p.push_str(&format!(
        "Here are {} scoring expressions. Each one performs better than the one before it \
         (gap = mean relative excess over the optimal tour length).\n\n",
        sorted.len()
    ));
    for (i, a) in sorted.iter().enumerate() {
        p.push_str(&format!("Expression {} (gap {:.4}):\n{}\n\n", i + 1, a.fitness, a.spec.display_text));
    }
    p.push_str("Write one new expression that should perform better than all of the above. Reply with the S-expression only.\n");
    p
}
