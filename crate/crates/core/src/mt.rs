//! Pluggable translation backends.
//!
//! `Live` talks to a chat-completion HTTP endpoint (bearer auth, temperature
//! pinned to 0 so repeated prompts stay comparable). `Record` wraps another
//! backend and appends every exchange to a JSON Lines fixture. `Replay`
//! answers from such a fixture by exact key — (pair id, level, prompt digest)
//! — and never touches the network, which is what makes the whole pipeline
//! deterministic and offline-testable.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cot::PromptPlan;
use crate::Language;

/// Which backend flavor a config describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Live,
    Replay,
    Record,
}

/// Backend configuration. Auth tokens are only ever named indirectly through
/// an environment variable, never stored.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub endpoint: Option<String>,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    pub auth_env: Option<String>,
    pub timeout_secs: u64,
    pub max_retries: u32,
    /// Initial retry backoff; doubles per retry (monotone non-decreasing).
    pub backoff_ms: u64,
    pub rate_limit_per_min: Option<u32>,
    pub fixture_path: Option<PathBuf>,
    /// Allow `Record` to replace an exchange already present in the fixture.
    pub overwrite_fixtures: bool,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            kind: BackendKind::Replay,
            endpoint: None,
            model: "gpt-4o-mini".to_owned(),
            auth_env: None,
            timeout_secs: 30,
            max_retries: 2,
            backoff_ms: 500,
            rate_limit_per_min: None,
            fixture_path: None,
            overwrite_fixtures: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error("auth environment variable {var} is not set")]
    AuthMissing { var: String },
    #[error("invalid backend config: {0}")]
    InvalidConfig(String),
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("rate limited after {attempts} attempt(s)")]
    RateLimited { attempts: u32 },
    #[error("no recorded exchange for pair {pair_id} level {level} (prompt digest {digest})")]
    FixtureMiss {
        pair_id: String,
        level: u8,
        digest: String,
    },
    #[error("fixture {path}: {msg}")]
    Fixture { path: String, msg: String },
    #[error("endpoint returned status {status}: {body}")]
    Http { status: u16, body: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
}

/// One request/response exchange, as stored in fixture files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationExchange {
    pub request: ExchangeRequest,
    pub response: ExchangeResponse,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeRequest {
    pub pair_id: String,
    pub level: u8,
    pub language: Language,
    pub prompt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeResponse {
    pub translation: String,
    /// SHA-256 of the raw response payload (live) or of the translation
    /// (scripted sources).
    pub payload_digest: String,
    pub latency_ms: u64,
    pub timestamp: u64,
}

pub fn sha256_hex(data: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data.as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Exact replay key: pair id, level, and the prompt digest. Changing a prompt
/// template intentionally invalidates recorded fixtures.
pub fn exchange_key(pair_id: &str, level: u8, prompt: &str) -> String {
    format!("{pair_id}\u{1f}{level}\u{1f}{}", sha256_hex(prompt))
}

/// A translation backend. `pair_id` keys record/replay fixtures.
pub trait TranslationBackend: Sync {
    fn translate(&self, pair_id: &str, plan: &PromptPlan) -> Result<String, BackendError>;
    /// Tag recorded into audit output (e.g. model name).
    fn tag(&self) -> String;
}

/// Builds the backend a config describes.
pub fn backend_from_config(
    config: &BackendConfig,
) -> Result<Box<dyn TranslationBackend>, BackendError> {
    match config.kind {
        BackendKind::Live => Ok(Box::new(LiveBackend::new(config)?)),
        BackendKind::Replay => {
            let path = config.fixture_path.as_ref().ok_or_else(|| {
                BackendError::InvalidConfig("replay requires a fixture path".into())
            })?;
            Ok(Box::new(ReplayBackend::open(path)?))
        }
        BackendKind::Record => {
            let path = config
                .fixture_path
                .as_ref()
                .ok_or_else(|| {
                    BackendError::InvalidConfig("record requires a fixture path".into())
                })?
                .clone();
            let live = LiveBackend::new(config)?;
            Ok(Box::new(RecordBackend::create(
                Box::new(live),
                path,
                config.overwrite_fixtures,
            )?))
        }
    }
}

// ---------------------------------------------------------------------------
// live

/// Chat-completion HTTP backend.
#[derive(Debug)]
pub struct LiveBackend {
    agent: ureq::Agent,
    endpoint: String,
    model: String,
    token: String,
    max_retries: u32,
    backoff: Duration,
    limiter: Option<RateLimiter>,
}

impl LiveBackend {
    pub fn new(config: &BackendConfig) -> Result<Self, BackendError> {
        let endpoint = config
            .endpoint
            .clone()
            .ok_or_else(|| BackendError::InvalidConfig("live requires an endpoint".into()))?;
        let auth_env = config.auth_env.clone().ok_or_else(|| {
            BackendError::InvalidConfig("live requires an auth_env variable name".into())
        })?;
        let token =
            std::env::var(&auth_env).map_err(|_| BackendError::AuthMissing { var: auth_env })?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(LiveBackend {
            agent,
            endpoint,
            model: config.model.clone(),
            token,
            max_retries: config.max_retries,
            backoff: Duration::from_millis(config.backoff_ms),
            limiter: config.rate_limit_per_min.map(RateLimiter::new),
        })
    }

    fn request_once(&self, prompt: &str) -> Result<(String, String), BackendError> {
        let body = serde_json::json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        });
        let mut response = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", &format!("Bearer {}", self.token))
            .send_json(&body)
            .map_err(|e| match e {
                ureq::Error::Timeout(_) => BackendError::Timeout { attempts: 1 },
                other => BackendError::Transport(other.to_string()),
            })?;
        let status = response.status().as_u16();
        let raw = response
            .body_mut()
            .read_to_string()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        if status == 429 {
            return Err(BackendError::RateLimited { attempts: 1 });
        }
        if !(200..300).contains(&status) {
            return Err(BackendError::Http { status, body: raw });
        }
        let parsed: serde_json::Value = serde_json::from_str(&raw)
            .map_err(|e| BackendError::MalformedResponse(e.to_string()))?;
        let content = parsed["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| {
                BackendError::MalformedResponse("missing choices[0].message.content".into())
            })?;
        Ok((content.trim().to_owned(), raw))
    }

    /// Full request with rate limiting and retries; returns the translation
    /// and the raw payload.
    pub fn request(&self, prompt: &str) -> Result<(String, String), BackendError> {
        let mut delay = self.backoff;
        let mut attempt = 0u32;
        loop {
            if let Some(limiter) = &self.limiter {
                limiter.acquire();
            }
            attempt += 1;
            match self.request_once(prompt) {
                Ok(ok) => return Ok(ok),
                Err(e) if attempt <= self.max_retries && retryable(&e) => {
                    std::thread::sleep(delay);
                    delay = delay.saturating_mul(2);
                }
                Err(e) => return Err(annotate_attempts(e, attempt)),
            }
        }
    }
}

fn retryable(e: &BackendError) -> bool {
    match e {
        BackendError::RateLimited { .. } | BackendError::Timeout { .. } => true,
        BackendError::Http { status, .. } => *status >= 500,
        BackendError::Transport(_) => true,
        _ => false,
    }
}

fn annotate_attempts(e: BackendError, attempts: u32) -> BackendError {
    match e {
        BackendError::RateLimited { .. } => BackendError::RateLimited { attempts },
        BackendError::Timeout { .. } => BackendError::Timeout { attempts },
        other => other,
    }
}

impl TranslationBackend for LiveBackend {
    fn translate(&self, _pair_id: &str, plan: &PromptPlan) -> Result<String, BackendError> {
        self.request(&plan.text).map(|(translation, _)| translation)
    }

    fn tag(&self) -> String {
        self.model.clone()
    }
}

/// Sliding-window requests-per-minute limiter with a blocking acquire.
#[derive(Debug)]
struct RateLimiter {
    per_minute: u32,
    window: Mutex<Vec<Instant>>,
}

impl RateLimiter {
    fn new(per_minute: u32) -> Self {
        RateLimiter {
            per_minute: per_minute.max(1),
            window: Mutex::new(Vec::new()),
        }
    }

    fn acquire(&self) {
        loop {
            let wait = {
                let mut window = self.window.lock().unwrap();
                if let Some(cutoff) = Instant::now().checked_sub(Duration::from_secs(60)) {
                    window.retain(|t| *t > cutoff);
                }
                if (window.len() as u32) < self.per_minute {
                    window.push(Instant::now());
                    None
                } else {
                    let oldest = window[0];
                    Some(oldest + Duration::from_secs(60) - Instant::now())
                }
            };
            match wait {
                None => return,
                Some(d) => std::thread::sleep(d.max(Duration::from_millis(1))),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// fixtures

/// JSON Lines fixture of exchanges, keyed by (pair id, level, prompt digest).
#[derive(Debug)]
pub struct FixtureStore {
    path: PathBuf,
    entries: HashMap<String, TranslationExchange>,
}

impl FixtureStore {
    pub fn load(path: &Path) -> Result<Self, BackendError> {
        let file = std::fs::File::open(path).map_err(|e| BackendError::Fixture {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let mut entries = HashMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| BackendError::Fixture {
                path: path.display().to_string(),
                msg: format!("line {}: {e}", idx + 1),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let exchange: TranslationExchange =
                serde_json::from_str(&line).map_err(|e| BackendError::Fixture {
                    path: path.display().to_string(),
                    msg: format!("line {}: {e}", idx + 1),
                })?;
            let key = exchange_key(
                &exchange.request.pair_id,
                exchange.request.level,
                &exchange.request.prompt,
            );
            entries.insert(key, exchange);
        }
        Ok(FixtureStore {
            path: path.to_owned(),
            entries,
        })
    }

    /// Opens an existing fixture or starts an empty one at `path`.
    pub fn load_or_empty(path: &Path) -> Result<Self, BackendError> {
        if path.exists() {
            FixtureStore::load(path)
        } else {
            Ok(FixtureStore {
                path: path.to_owned(),
                entries: HashMap::new(),
            })
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&TranslationExchange> {
        self.entries.get(key)
    }

    /// Appends one exchange to the file and the in-memory index.
    pub fn append(&mut self, exchange: TranslationExchange) -> Result<(), BackendError> {
        let line = serde_json::to_string(&exchange).map_err(|e| BackendError::Fixture {
            path: self.path.display().to_string(),
            msg: e.to_string(),
        })?;
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| BackendError::Fixture {
                path: self.path.display().to_string(),
                msg: e.to_string(),
            })?;
        writeln!(file, "{line}").map_err(|e| BackendError::Fixture {
            path: self.path.display().to_string(),
            msg: e.to_string(),
        })?;
        let key = exchange_key(
            &exchange.request.pair_id,
            exchange.request.level,
            &exchange.request.prompt,
        );
        self.entries.insert(key, exchange);
        Ok(())
    }

    /// Replaces an existing exchange and rewrites the file.
    pub fn replace(&mut self, exchange: TranslationExchange) -> Result<(), BackendError> {
        let key = exchange_key(
            &exchange.request.pair_id,
            exchange.request.level,
            &exchange.request.prompt,
        );
        self.entries.insert(key, exchange);
        let mut lines: Vec<String> = Vec::with_capacity(self.entries.len());
        let mut sorted: Vec<&TranslationExchange> = self.entries.values().collect();
        sorted.sort_by(|a, b| {
            (&a.request.pair_id, a.request.level).cmp(&(&b.request.pair_id, b.request.level))
        });
        for entry in sorted {
            lines.push(
                serde_json::to_string(entry).map_err(|e| BackendError::Fixture {
                    path: self.path.display().to_string(),
                    msg: e.to_string(),
                })?,
            );
        }
        std::fs::write(&self.path, lines.join("\n") + "\n").map_err(|e| BackendError::Fixture {
            path: self.path.display().to_string(),
            msg: e.to_string(),
        })
    }
}

/// Answers from a fixture; a missing key is an error, never a fallthrough to
/// the network.
#[derive(Debug)]
pub struct ReplayBackend {
    store: FixtureStore,
}

impl ReplayBackend {
    pub fn open(path: &Path) -> Result<Self, BackendError> {
        Ok(ReplayBackend {
            store: FixtureStore::load(path)?,
        })
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }
}

impl TranslationBackend for ReplayBackend {
    fn translate(&self, pair_id: &str, plan: &PromptPlan) -> Result<String, BackendError> {
        let key = exchange_key(pair_id, plan.level, &plan.text);
        self.store
            .get(&key)
            .map(|e| e.response.translation.clone())
            .ok_or_else(|| BackendError::FixtureMiss {
                pair_id: pair_id.to_owned(),
                level: plan.level,
                digest: sha256_hex(&plan.text),
            })
    }

    fn tag(&self) -> String {
        "replay".to_owned()
    }
}

/// Wraps another backend and records every exchange. A key already present is
/// served from the fixture (and only re-fetched with `overwrite`).
pub struct RecordBackend {
    inner: Box<dyn TranslationBackend>,
    store: Mutex<FixtureStore>,
    overwrite: bool,
}

impl RecordBackend {
    pub fn create(
        inner: Box<dyn TranslationBackend>,
        path: PathBuf,
        overwrite: bool,
    ) -> Result<Self, BackendError> {
        Ok(RecordBackend {
            inner,
            store: Mutex::new(FixtureStore::load_or_empty(&path)?),
            overwrite,
        })
    }
}

impl TranslationBackend for RecordBackend {
    fn translate(&self, pair_id: &str, plan: &PromptPlan) -> Result<String, BackendError> {
        let key = exchange_key(pair_id, plan.level, &plan.text);
        {
            let store = self.store.lock().unwrap();
            if !self.overwrite {
                if let Some(existing) = store.get(&key) {
                    return Ok(existing.response.translation.clone());
                }
            }
        }
        let started = Instant::now();
        let translation = self.inner.translate(pair_id, plan)?;
        let exchange = TranslationExchange {
            request: ExchangeRequest {
                pair_id: pair_id.to_owned(),
                level: plan.level,
                language: plan.language,
                prompt: plan.text.clone(),
            },
            response: ExchangeResponse {
                payload_digest: sha256_hex(&translation),
                translation,
                latency_ms: started.elapsed().as_millis() as u64,
                timestamp: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            },
        };
        let translation = exchange.response.translation.clone();
        let mut store = self.store.lock().unwrap();
        if self.overwrite && store.get(&key).is_some() {
            store.replace(exchange)?;
        } else {
            store.append(exchange)?;
        }
        Ok(translation)
    }

    fn tag(&self) -> String {
        self.inner.tag()
    }
}

/// Deterministic in-memory backend for tests and fixture generation: hands
/// out its scripted replies in order and counts calls.
pub struct ScriptedBackend {
    replies: Mutex<std::collections::VecDeque<String>>,
    calls: AtomicUsize,
    tag: String,
}

impl ScriptedBackend {
    pub fn new<I, S>(replies: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedBackend {
            replies: Mutex::new(replies.into_iter().map(Into::into).collect()),
            calls: AtomicUsize::new(0),
            tag: "scripted".to_owned(),
        }
    }

    pub fn with_tag(mut self, tag: &str) -> Self {
        self.tag = tag.to_owned();
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl TranslationBackend for ScriptedBackend {
    fn translate(&self, _pair_id: &str, _plan: &PromptPlan) -> Result<String, BackendError> {
        let reply = self.replies.lock().unwrap().pop_front();
        match reply {
            Some(reply) => {
                self.calls.fetch_add(1, Ordering::SeqCst);
                Ok(reply)
            }
            None => Err(BackendError::Transport("scripted replies exhausted".into())),
        }
    }

    fn tag(&self) -> String {
        self.tag.clone()
    }
}
