use std::thread;
use std::time::Duration;

use log::warn;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbedError {
    #[error("embedding request failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("embedding endpoint returned HTTP {status}: {excerpt}")]
    Http { status: u16, excerpt: String },
    #[error("malformed embedding response: {0}")]
    Malformed(String),
    #[error("backend produced a {found}-dimensional vector, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("backend produced a non-finite vector component")]
    NonFinite,
}

/// Text to fixed-dimension vector. `embed_batch` must be deterministic for
/// a given backend instance and return one vector per input, in order.
pub trait EmbeddingBackend: Send + Sync {
    fn name(&self) -> &str;
    fn dimension(&self) -> usize;
    fn embed_batch(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError>;

    fn embed(&self, text: &str) -> Result<Vec<f32>, EmbedError> {
        let mut v = self.embed_batch(&[text.to_string()])?;
        v.pop().ok_or_else(|| EmbedError::Malformed("empty batch reply".into()))
    }
}

/// Deterministic bag-of-words backend: lowercase, split on
/// non-alphanumerics, hash each token into one of `dim` buckets with
/// 64-bit FNV-1a, count, L2-normalize.
#[derive(Debug, Clone)]
pub struct HashingBackend {
    dim: usize,
    name: String,
}

impl HashingBackend {
    pub const DEFAULT_DIM: usize = 256;

    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        HashingBackend {
            dim,
            name: format!("hash{dim}"),
        }
    }

    pub fn vector(&self, text: &str) -> Vec<f32> {
        let mut counts = vec![0f64; self.dim];
        let lower = text.to_lowercase();
        for token in lower.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()) {
            counts[(fnv1a(token.as_bytes()) % self.dim as u64) as usize] += 1.0;
        }
        let norm = counts.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 {
            counts.iter().map(|c| (c / norm) as f32).collect()
        } else {
            vec![0.0; self.dim]
        }
    }
}

impl Default for HashingBackend {
    fn default() -> Self {
        HashingBackend::new(Self::DEFAULT_DIM)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl EmbeddingBackend for HashingBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        Ok(texts.iter().map(|t| self.vector(t)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingConfig {
    pub base_url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
    pub max_retries: u32,
    pub backoff: Duration,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            base_url: "https://api.openai.com".into(),
            model: "text-embedding-3-small".into(),
            api_key: None,
            timeout: Duration::from_secs(60),
            max_retries: 3,
            backoff: Duration::from_millis(500),
        }
    }
}

impl EmbeddingConfig {
    /// Defaults overridden by `LOGICGEN_BASE_URL`/`OPENAI_BASE_URL`,
    /// `LOGICGEN_API_KEY`/`OPENAI_API_KEY` and `LOGICGEN_EMBED_MODEL`.
    pub fn from_env() -> Self {
        let var = |names: &[&str]| names.iter().find_map(|n| std::env::var(n).ok().filter(|v| !v.is_empty()));
        let mut cfg = EmbeddingConfig::default();
        if let Some(base) = var(&["LOGICGEN_BASE_URL", "OPENAI_BASE_URL"]) {
            cfg.base_url = base;
        }
        cfg.api_key = var(&["LOGICGEN_API_KEY", "OPENAI_API_KEY"]);
        if let Some(model) = var(&["LOGICGEN_EMBED_MODEL"]) {
            cfg.model = model;
        }
        cfg
    }

    pub fn endpoint(&self) -> String {
        format!("{}/v1/embeddings", self.base_url.trim_end_matches('/'))
    }
}

/// Client for `POST {base}/v1/embeddings`.
pub struct HttpEmbedder {
    config: EmbeddingConfig,
    agent: ureq::Agent,
    dim: usize,
    name: String,
}

impl HttpEmbedder {
    /// Connects with a known dimension, or probes the endpoint once to
    /// learn it.
    pub fn connect(config: EmbeddingConfig, dim: Option<usize>) -> Result<Self, EmbedError> {
        let agent = ureq::AgentBuilder::new().timeout(config.timeout).build();
        let name = format!("http:{}", config.model);
        let mut client = HttpEmbedder {
            config,
            agent,
            dim: dim.unwrap_or(0),
            name,
        };
        if dim.is_none() {
            let probe = client.request(&["dimension probe".to_string()])?;
            client.dim = probe.first().map(Vec::len).unwrap_or(0);
            if client.dim == 0 {
                return Err(EmbedError::Malformed("probe returned an empty vector".into()));
            }
        }
        Ok(client)
    }

    fn attempt(&self, body: &Value) -> Result<Value, (bool, EmbedError)> {
        let mut request = self.agent.post(&self.config.endpoint());
        if let Some(key) = &self.config.api_key {
            request = request.set("Authorization", &format!("Bearer {key}"));
        }
        match request.send_json(body) {
            Ok(resp) => resp.into_json().map_err(|e| (true, EmbedError::Malformed(e.to_string()))),
            Err(ureq::Error::Status(status, resp)) => {
                let excerpt = resp.into_string().unwrap_or_default().chars().take(200).collect();
                Err((status == 429 || status >= 500, EmbedError::Http { status, excerpt }))
            }
            Err(ureq::Error::Transport(t)) => Err((
                true,
                EmbedError::Transport {
                    attempts: 1,
                    message: t.to_string(),
                },
            )),
        }
    }

    fn request(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        let body = json!({"model": self.config.model, "input": texts});
        let mut delay = self.config.backoff;
        let mut attempts = 0;
        let value = loop {
            attempts += 1;
            match self.attempt(&body) {
                Ok(v) => break v,
                Err((true, e)) if attempts <= self.config.max_retries => {
                    warn!("transient embedding failure, retrying in {delay:?}: {e}");
                    thread::sleep(delay);
                    delay = delay.saturating_mul(2);
                }
                Err((_, EmbedError::Transport { message, .. })) => {
                    return Err(EmbedError::Transport { attempts, message })
                }
                Err((_, e)) => return Err(e),
            }
        };
        parse_embeddings(&value, texts.len())
    }
}

/// Vectors of an OpenAI-style embeddings reply, ordered by `index` when
/// present.
fn parse_embeddings(value: &Value, expected: usize) -> Result<Vec<Vec<f32>>, EmbedError> {
    let data = value["data"]
        .as_array()
        .ok_or_else(|| EmbedError::Malformed("missing \"data\" list".into()))?;
    let mut rows: Vec<(usize, Vec<f32>)> = Vec::with_capacity(data.len());
    for (pos, item) in data.iter().enumerate() {
        let index = item["index"].as_u64().map(|i| i as usize).unwrap_or(pos);
        let vector = item["embedding"]
            .as_array()
            .ok_or_else(|| EmbedError::Malformed(format!("entry {pos} has no embedding")))?
            .iter()
            .map(|x| x.as_f64().map(|f| f as f32))
            .collect::<Option<Vec<f32>>>()
            .ok_or_else(|| EmbedError::Malformed(format!("entry {pos} has a non-numeric component")))?;
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(EmbedError::NonFinite);
        }
        rows.push((index, vector));
    }
    if rows.len() != expected {
        return Err(EmbedError::Malformed(format!("{} vectors for {expected} inputs", rows.len())));
    }
    rows.sort_by_key(|(i, _)| *i);
    Ok(rows.into_iter().map(|(_, v)| v).collect())
}

impl EmbeddingBackend for HttpEmbedder {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let rows = self.request(texts)?;
        if let Some(bad) = rows.iter().find(|r| r.len() != self.dim) {
            return Err(EmbedError::Dimension {
                expected: self.dim,
                found: bad.len(),
            });
        }
        Ok(rows)
    }
}
