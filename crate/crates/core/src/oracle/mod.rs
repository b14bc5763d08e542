//! Oracles answer expansion, rating, follow-up, generalization and triplet
//! requests. A live oracle talks to an OpenAI-compatible chat endpoint; a
//! replay oracle answers from a fixture file and never touches the network.

mod http;
mod replay;
mod templates;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use http::{ChatClient, ChatConfig};
pub use replay::{CaptureOracle, ReplayFixture, ReplayOracle};
pub use templates::PromptTemplates;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purpose {
    Expand,
    Followups,
    Answer,
    Rate,
    Generalize,
    Svo,
}

impl Purpose {
    pub const ALL: [Purpose; 6] = [
        Purpose::Expand,
        Purpose::Followups,
        Purpose::Answer,
        Purpose::Rate,
        Purpose::Generalize,
        Purpose::Svo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Purpose::Expand => "expand",
            Purpose::Followups => "followups",
            Purpose::Answer => "answer",
            Purpose::Rate => "rate",
            Purpose::Generalize => "generalize",
            Purpose::Svo => "svo",
        }
    }
}

impl fmt::Display for Purpose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Purpose {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Purpose::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| OracleError::Config(format!("unknown purpose {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRequest {
    pub purpose: Purpose,
    pub goal_text: String,
    /// Goals on the path leading to this request, root first.
    pub trace: Vec<String>,
    pub params: BTreeMap<String, String>,
}

impl OracleRequest {
    pub fn new(purpose: Purpose, goal_text: impl Into<String>) -> Self {
        OracleRequest {
            purpose,
            goal_text: goal_text.into(),
            trace: Vec::new(),
            params: BTreeMap::new(),
        }
    }

    pub fn with_trace(mut self, trace: Vec<String>) -> Self {
        self.trace = trace;
        self
    }

    pub fn with_param(mut self, key: &str, value: impl Into<String>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    /// Fixture key: purpose, goal text and a hash of the trace, so the same
    /// goal asked in different contexts replays distinctly.
    pub fn key(&self) -> String {
        let mut hasher = Sha256::new();
        for step in &self.trace {
            hasher.update(step.as_bytes());
            hasher.update([0x1f]);
        }
        let digest = hasher.finalize();
        let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        format!("{}#{}", self.context_free_key(), hex)
    }

    /// Key without the trace hash; fixtures may use it to answer a goal in
    /// every context.
    pub fn context_free_key(&self) -> String {
        format!("{}:{}", self.purpose, self.goal_text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResponse {
    #[serde(default)]
    pub items: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating: Option<f64>,
    #[serde(default)]
    pub raw: String,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("request failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("HTTP {status}: {excerpt}")]
    Http { status: u16, excerpt: String },
    #[error("could not parse {purpose} reply: {raw:?}")]
    Unparseable { purpose: Purpose, raw: String },
    #[error("no fixture entry for {0:?}")]
    MissingFixture(String),
    #[error("rating {0} outside [0, 100]")]
    RatingOutOfRange(f64),
    #[error("fixture file: {0}")]
    Fixture(String),
    #[error("oracle configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub trait Oracle: Send + Sync {
    fn ask(&self, req: &OracleRequest) -> Result<OracleResponse, OracleError>;
}

impl<O: Oracle + ?Sized> Oracle for &O {
    fn ask(&self, req: &OracleRequest) -> Result<OracleResponse, OracleError> {
        (**self).ask(req)
    }
}

impl<O: Oracle + ?Sized> Oracle for Box<O> {
    fn ask(&self, req: &OracleRequest) -> Result<OracleResponse, OracleError> {
        (**self).ask(req)
    }
}

impl<O: Oracle + ?Sized> Oracle for Arc<O> {
    fn ask(&self, req: &OracleRequest) -> Result<OracleResponse, OracleError> {
        (**self).ask(req)
    }
}

fn bullet_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*(?:[-*•+]+|\d+[.)])\s+").unwrap())
}

fn number_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"-?\d+(?:\.\d+)?").unwrap())
}

/// Strips a list bullet or number and one pair of surrounding quotes.
pub fn clean_item(line: &str) -> String {
    let line = bullet_re().replace(line, "");
    let line = line.trim();
    let unquoted = ['\'', '"']
        .iter()
        .find_map(|q| line.strip_prefix(*q).and_then(|l| l.strip_suffix(*q)))
        .unwrap_or(line);
    unquoted.trim().to_string()
}

/// Collapses every run of whitespace, newlines included, to one space.
pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// First number in the reply, clamped to `[0, 100]`.
pub fn parse_rating(raw: &str) -> Option<f64> {
    let m = number_re().find(raw)?;
    let value: f64 = m.as_str().parse().ok()?;
    Some(value.clamp(0.0, 100.0))
}

/// Turns a raw reply into a response for `purpose`.
///
/// Ratings take the first number; answers become a single whitespace
/// collapsed item; other purposes yield one item per non-empty line. Empty
/// generalization and triplet replies are valid.
pub fn parse_reply(purpose: Purpose, raw: &str) -> Result<OracleResponse, OracleError> {
    let unparseable = || OracleError::Unparseable {
        purpose,
        raw: raw.to_string(),
    };
    let (items, rating) = match purpose {
        Purpose::Rate => (Vec::new(), Some(parse_rating(raw).ok_or_else(unparseable)?)),
        Purpose::Answer => {
            let answer = collapse_whitespace(raw);
            if answer.is_empty() {
                return Err(unparseable());
            }
            (vec![answer], None)
        }
        Purpose::Expand | Purpose::Followups | Purpose::Generalize | Purpose::Svo => {
            let items: Vec<String> = raw.lines().map(clean_item).filter(|l| !l.is_empty()).collect();
            if items.is_empty() && matches!(purpose, Purpose::Expand | Purpose::Followups) {
                return Err(unparseable());
            }
            (items, None)
        }
    };
    Ok(OracleResponse {
        items,
        rating,
        raw: raw.to_string(),
    })
}

/// Accept decision of the rater: inclusive at the threshold.
pub fn accept(rating: f64, threshold: f64) -> Result<bool, OracleError> {
    for v in [rating, threshold] {
        if !(0.0..=100.0).contains(&v) {
            return Err(OracleError::RatingOutOfRange(v));
        }
    }
    Ok(rating >= threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rating_reply() {
        let r = parse_reply(Purpose::Rate, "85").unwrap();
        assert_eq!(r.rating, Some(85.0));
        assert!(r.items.is_empty());
        let r = parse_reply(Purpose::Rate, "I'd say about 72.5 out of 100").unwrap();
        assert_eq!(r.rating, Some(72.5));
        assert_eq!(parse_reply(Purpose::Rate, "150").unwrap().rating, Some(100.0));
        assert!(matches!(
            parse_reply(Purpose::Rate, "no idea"),
            Err(OracleError::Unparseable { .. })
        ));
    }

    #[test]
    fn expansion_reply_is_split_into_lines() {
        let r = parse_reply(Purpose::Expand, "- A\n- B\n- C").unwrap();
        assert_eq!(r.items, vec!["A", "B", "C"]);
        let r = parse_reply(Purpose::Expand, "1. 'Increased accident risk'\n2) \"Reduced reaction time\"\n\n").unwrap();
        assert_eq!(r.items, vec!["Increased accident risk", "Reduced reaction time"]);
        assert!(parse_reply(Purpose::Expand, "  \n").is_err());
        assert!(parse_reply(Purpose::Generalize, "").unwrap().items.is_empty());
    }

    #[test]
    fn answers_are_collapsed() {
        let r = parse_reply(Purpose::Answer, "Constructive negation\n   derives new\nconstraints.").unwrap();
        assert_eq!(r.items, vec!["Constructive negation derives new constraints."]);
    }

    #[test]
    fn accept_is_inclusive() {
        assert!(accept(85.0, 70.0).unwrap());
        assert!(accept(70.0, 70.0).unwrap());
        assert!(!accept(40.0, 70.0).unwrap());
        assert!(accept(101.0, 70.0).is_err());
        assert!(accept(50.0, -1.0).is_err());
    }

    #[test]
    fn keys_depend_on_trace() {
        let a = OracleRequest::new(Purpose::Expand, "g");
        let b = OracleRequest::new(Purpose::Expand, "g").with_trace(vec!["root".into()]);
        assert_ne!(a.key(), b.key());
        assert_eq!(a.context_free_key(), b.context_free_key());
        assert!(a.key().starts_with("expand:g#"));
        assert_eq!(a.key(), OracleRequest::new(Purpose::Expand, "g").key());
    }

    #[test]
    fn purposes_parse() {
        for p in Purpose::ALL {
            assert_eq!(p.as_str().parse::<Purpose>().unwrap(), p);
        }
        assert!("bogus".parse::<Purpose>().is_err());
    }
}
