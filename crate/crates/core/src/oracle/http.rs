use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use log::{debug, warn};
use serde_json::{json, Value};

use super::{parse_reply, Oracle, OracleError, OracleRequest, OracleResponse, PromptTemplates};

const EXCERPT_LEN: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct ChatConfig {
    pub base_url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
    pub max_retries: u32,
    /// First retry delay; doubles on every further attempt.
    pub backoff: Duration,
    pub temperature: f64,
    pub max_in_flight: usize,
}

impl Default for ChatConfig {
    fn default() -> Self {
        ChatConfig {
            base_url: "https://api.openai.com".into(),
            model: "gpt-4o-mini".into(),
            api_key: None,
            timeout: Duration::from_secs(60),
            max_retries: 3,
            backoff: Duration::from_millis(500),
            temperature: 0.0,
            max_in_flight: 4,
        }
    }
}

impl ChatConfig {
    /// Defaults overridden by `LOGICGEN_BASE_URL`/`OPENAI_BASE_URL`,
    /// `LOGICGEN_API_KEY`/`OPENAI_API_KEY` and `LOGICGEN_MODEL`.
    pub fn from_env() -> Self {
        let var = |names: &[&str]| names.iter().find_map(|n| std::env::var(n).ok().filter(|v| !v.is_empty()));
        let mut cfg = ChatConfig::default();
        if let Some(base) = var(&["LOGICGEN_BASE_URL", "OPENAI_BASE_URL"]) {
            cfg.base_url = base;
        }
        cfg.api_key = var(&["LOGICGEN_API_KEY", "OPENAI_API_KEY"]);
        if let Some(model) = var(&["LOGICGEN_MODEL"]) {
            cfg.model = model;
        }
        cfg
    }

    pub fn endpoint(&self) -> String {
        format!("{}/v1/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

struct InFlight {
    count: Mutex<usize>,
    freed: Condvar,
    limit: usize,
}

impl InFlight {
    fn acquire(&self) -> InFlightGuard<'_> {
        let mut count = self.count.lock().unwrap();
        while *count >= self.limit {
            count = self.freed.wait(count).unwrap();
        }
        *count += 1;
        InFlightGuard(self)
    }
}

struct InFlightGuard<'a>(&'a InFlight);

impl Drop for InFlightGuard<'_> {
    fn drop(&mut self) {
        *self.0.count.lock().unwrap() -= 1;
        self.0.freed.notify_one();
    }
}

/// Blocking client for `POST {base}/v1/chat/completions`.
pub struct ChatClient {
    config: ChatConfig,
    templates: PromptTemplates,
    agent: ureq::Agent,
    in_flight: InFlight,
}

enum Attempt {
    Retry(OracleError),
    Fatal(OracleError),
}

impl ChatClient {
    pub fn new(config: ChatConfig, templates: PromptTemplates) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(config.timeout).build();
        let in_flight = InFlight {
            count: Mutex::new(0),
            freed: Condvar::new(),
            limit: config.max_in_flight.max(1),
        };
        ChatClient {
            config,
            templates,
            agent,
            in_flight,
        }
    }

    pub fn config(&self) -> &ChatConfig {
        &self.config
    }

    fn body(&self, req: &OracleRequest) -> Value {
        json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [
                {"role": "system", "content": self.templates.system},
                {"role": "user", "content": self.templates.render(req)},
            ],
        })
    }

    fn attempt(&self, body: &Value) -> Result<String, Attempt> {
        let mut request = self.agent.post(&self.config.endpoint());
        if let Some(key) = &self.config.api_key {
            request = request.set("Authorization", &format!("Bearer {key}"));
        }
        match request.send_json(body) {
            Ok(resp) => {
                let value: Value = resp
                    .into_json()
                    .map_err(|e| Attempt::Retry(transport(1, e.to_string())))?;
                value["choices"][0]["message"]["content"]
                    .as_str()
                    .map(str::to_string)
                    .ok_or_else(|| {
                        Attempt::Fatal(OracleError::Http {
                            status: 200,
                            excerpt: excerpt(&value.to_string()),
                        })
                    })
            }
            Err(ureq::Error::Status(status, resp)) => {
                let text = resp.into_string().unwrap_or_default();
                let err = OracleError::Http {
                    status,
                    excerpt: excerpt(&text),
                };
                if status == 429 || status >= 500 {
                    Err(Attempt::Retry(err))
                } else {
                    Err(Attempt::Fatal(err))
                }
            }
            Err(ureq::Error::Transport(t)) => Err(Attempt::Retry(transport(1, t.to_string()))),
        }
    }
}

fn transport(attempts: u32, message: String) -> OracleError {
    OracleError::Transport { attempts, message }
}

fn excerpt(text: &str) -> String {
    text.chars().take(EXCERPT_LEN).collect()
}

impl Oracle for ChatClient {
    fn ask(&self, req: &OracleRequest) -> Result<OracleResponse, OracleError> {
        let body = self.body(req);
        let _slot = self.in_flight.acquire();
        let mut delay = self.config.backoff;
        let mut attempts = 0;
        loop {
            attempts += 1;
            debug!("{} request for {:?} (attempt {attempts})", req.purpose, req.goal_text);
            match self.attempt(&body) {
                Ok(content) => return parse_reply(req.purpose, &content),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(e)) if attempts > self.config.max_retries => {
                    return Err(match e {
                        OracleError::Transport { message, .. } => transport(attempts, message),
                        other => other,
                    });
                }
                Err(Attempt::Retry(e)) => {
                    warn!("transient oracle failure, retrying in {delay:?}: {e}");
                    thread::sleep(delay);
                    delay = delay.saturating_mul(2);
                }
            }
        }
    }
}
