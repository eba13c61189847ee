//! Remote endpoint clients: chat-completion editors and judges, and an
//! embedding-service featurizer. All speak the OpenAI-compatible wire shape
//! (`/chat/completions`, `/embeddings`) over a blocking agent.
//!
//! Credentials come only from environment variables named in the config —
//! never from the config file itself — and are checked at client
//! construction so misconfigured runs fail before any query is spent.
//! Transport failures retry with exponential backoff (3 attempts by
//! default); HTTP 4xx fails fast. Request/response bodies can be mirrored
//! to a transcript file with authorization material never written.

use crate::bandit::ContextVector;
use crate::embed::{combine_texts, Embedder};
use crate::error::{Error, Result};
use crate::judges::{
    parse_pairwise_response, parse_pointwise_response, Judge, JudgeMode, JudgePromptSet,
    JudgeVerdict,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::sync::Mutex;
use std::time::Duration;

pub const POINTWISE_JUDGE_TEMPLATE: &str = include_str!("../assets/prompts/judge_pointwise.txt");
pub const PAIRWISE_JUDGE_TEMPLATE: &str = include_str!("../assets/prompts/judge_pairwise.txt");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: Option<String>,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
}

fn default_timeout_secs() -> u64 {
    60
}
fn default_max_retries() -> u32 {
    3
}
fn default_backoff_ms() -> u64 {
    500
}

impl EndpointConfig {
    /// Resolve the credential now so a missing variable aborts startup.
    pub fn resolve_api_key(&self) -> Result<Option<String>> {
        match &self.api_key_env {
            None => Ok(None),
            Some(var) => std::env::var(var).map(Some).map_err(|_| {
                Error::Config(format!("credential environment variable {var} is not set"))
            }),
        }
    }
}

/// Exponential backoff schedule: base · 2^attempt.
pub fn backoff_delay(base_ms: u64, attempt: u32) -> Duration {
    Duration::from_millis(base_ms.saturating_mul(1u64 << attempt.min(16)))
}

/// 5xx and 429 are worth retrying; other failures are not.
pub fn is_retryable_status(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

struct Transcript {
    sink: Mutex<std::io::BufWriter<std::fs::File>>,
}

impl Transcript {
    fn log(&self, endpoint: &str, request: &serde_json::Value, response: &str) {
        if let Ok(mut w) = self.sink.lock() {
            let line = serde_json::json!({
                "endpoint": endpoint,
                "request": request,
                "response": response,
            });
            let _ = writeln!(w, "{line}");
            let _ = w.flush();
        }
    }
}

/// Blocking chat-completion client with retry.
pub struct ChatClient {
    cfg: EndpointConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
    transcript: Option<Transcript>,
}

impl ChatClient {
    pub fn new(cfg: EndpointConfig) -> Result<Self> {
        let api_key = cfg.resolve_api_key()?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(cfg.timeout_secs)))
            .build()
            .into();
        Ok(Self {
            cfg,
            api_key,
            agent,
            transcript: None,
        })
    }

    /// Mirror request/response bodies to a JSONL transcript file. The
    /// authorization header is never written.
    pub fn with_transcript(mut self, path: &std::path::Path) -> Result<Self> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let file = std::fs::File::create(path)?;
        self.transcript = Some(Transcript {
            sink: Mutex::new(std::io::BufWriter::new(file)),
        });
        Ok(self)
    }

    pub fn model(&self) -> &str {
        &self.cfg.model
    }

    fn post_json(&self, path: &str, body: &serde_json::Value) -> Result<serde_json::Value> {
        let url = format!("{}{path}", self.cfg.base_url.trim_end_matches('/'));
        let mut last_err = String::new();
        for attempt in 0..=self.cfg.max_retries {
            if attempt > 0 {
                std::thread::sleep(backoff_delay(self.cfg.backoff_ms, attempt - 1));
            }
            let mut req = self.agent.post(&url);
            if let Some(key) = &self.api_key {
                req = req.header("authorization", &format!("Bearer {key}"));
            }
            match req.send_json(body) {
                Ok(mut res) => {
                    let text = res
                        .body_mut()
                        .read_to_string()
                        .map_err(|e| Error::Transport(format!("reading response body: {e}")))?;
                    if let Some(t) = &self.transcript {
                        t.log(&url, body, &text);
                    }
                    return serde_json::from_str(&text)
                        .map_err(|e| Error::Transport(format!("malformed JSON response: {e}")));
                }
                Err(ureq::Error::StatusCode(code)) if is_retryable_status(code) => {
                    last_err = format!("http status {code}");
                }
                Err(ureq::Error::StatusCode(code)) => {
                    return Err(Error::Transport(format!("http status {code} from {url}")));
                }
                Err(e) => {
                    last_err = e.to_string();
                }
            }
        }
        Err(Error::Transport(format!(
            "{url} failed after {} attempts: {last_err}",
            self.cfg.max_retries + 1
        )))
    }

    /// One chat completion for a single user prompt.
    pub fn complete(&self, prompt: &str) -> Result<String> {
        let body = serde_json::json!({
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": prompt}],
        });
        let value = self.post_json("/chat/completions", &body)?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(|s| s.to_string())
            .ok_or_else(|| Error::Transport("completion response lacks message content".into()))
    }
}

impl crate::actions::TextCompleter for ChatClient {
    fn complete(&self, prompt: &str) -> Result<String> {
        ChatClient::complete(self, prompt)
    }
}

/// Remote LLM judge over a chat endpoint. The prompt set holds one or more
/// paraphrased variants; more than one variant is the randomized-prompting
/// defense applied at the source.
pub struct RemoteJudge {
    id: String,
    mode: JudgeMode,
    client: ChatClient,
    prompts: JudgePromptSet,
    rng: Mutex<StdRng>,
}

impl RemoteJudge {
    pub fn new(id: impl Into<String>, mode: JudgeMode, client: ChatClient) -> Self {
        let template = match mode {
            JudgeMode::Pointwise => POINTWISE_JUDGE_TEMPLATE,
            JudgeMode::Pairwise(_) => PAIRWISE_JUDGE_TEMPLATE,
        };
        Self::with_prompts(
            id,
            mode,
            client,
            JudgePromptSet {
                variants: vec![template.to_string()],
                selection_seed: 0,
            },
        )
        .expect("built-in template is valid")
    }

    pub fn with_prompts(
        id: impl Into<String>,
        mode: JudgeMode,
        client: ChatClient,
        prompts: JudgePromptSet,
    ) -> Result<Self> {
        prompts.validate()?;
        let seed = prompts.selection_seed;
        Ok(Self {
            id: id.into(),
            mode,
            client,
            prompts,
            rng: Mutex::new(StdRng::seed_from_u64(seed)),
        })
    }

    fn pick_variant(&self) -> String {
        let mut rng = self.rng.lock().unwrap();
        let idx = rng.random_range(0..self.prompts.variants.len());
        self.prompts.variants[idx].clone()
    }

    fn render(&self, inputs: &str, output: &str) -> String {
        self.pick_variant()
            .replace("{INPUTS}", inputs)
            .replace("{OUTPUT}", output)
    }
}

impl Judge for RemoteJudge {
    fn id(&self) -> &str {
        &self.id
    }

    fn mode(&self) -> JudgeMode {
        self.mode
    }

    fn score_pointwise(&self, question: &str, answer: &str) -> Result<JudgeVerdict> {
        if !matches!(self.mode, JudgeMode::Pointwise) {
            return Err(Error::Usage(format!(
                "judge {} is configured for pairwise comparison",
                self.id
            )));
        }
        let prompt = self.render(question, answer);
        let completion = self.client.complete(&prompt)?;
        parse_pointwise_response(&completion)
    }

    fn score_pairwise(&self, question: &str, first: &str, second: &str) -> Result<JudgeVerdict> {
        let mapping = match self.mode {
            JudgeMode::Pairwise(m) => m,
            JudgeMode::Pointwise => {
                return Err(Error::Usage(format!(
                    "judge {} is configured for pointwise grading",
                    self.id
                )))
            }
        };
        let output = format!("Answer A:\n{first}\n\nAnswer B:\n{second}");
        let prompt = self.render(question, &output);
        let completion = self.client.complete(&prompt)?;
        parse_pairwise_response(&completion, mapping)
    }
}

/// Remote embedding-service featurizer. Vectors are L2-normalized on
/// receipt so the unit-norm contract holds regardless of the service.
pub struct RemoteEmbedder {
    client: ChatClient,
    dim: usize,
}

impl RemoteEmbedder {
    pub fn new(client: ChatClient, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        Ok(Self { client, dim })
    }
}

impl Embedder for RemoteEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, question: &str, answer: &str) -> Result<ContextVector<f64>> {
        let body = serde_json::json!({
            "model": self.client.cfg.model,
            "input": combine_texts(question, answer),
        });
        let value = self.client.post_json("/embeddings", &body)?;
        let raw = value["data"][0]["embedding"]
            .as_array()
            .ok_or_else(|| Error::Transport("embedding response lacks a vector".into()))?;
        let values: Vec<f64> = raw.iter().filter_map(|v| v.as_f64()).collect();
        if values.len() != self.dim {
            return Err(Error::Config(format!(
                "service returned dimension {}, configured {}",
                values.len(),
                self.dim
            )));
        }
        ContextVector::normalized(values)
    }
}
