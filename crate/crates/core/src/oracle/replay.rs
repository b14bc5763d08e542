use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{parse_reply, Oracle, OracleError, OracleRequest, OracleResponse, Purpose};

/// Recorded oracle responses keyed by [`OracleRequest::key`] or, for entries
/// meant to answer in any context, [`OracleRequest::context_free_key`].
///
/// On disk entries may be either full responses or bare reply strings; bare
/// strings are parsed with the purpose named by the key prefix.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplayFixture {
    pub recorded_from: Option<String>,
    pub entries: BTreeMap<String, OracleResponse>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StoredEntry {
    Reply(String),
    Response(OracleResponse),
}

#[derive(Serialize, Deserialize)]
struct StoredFixture {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    recorded_from: Option<String>,
    entries: BTreeMap<String, StoredEntry>,
}

fn purpose_of_key(key: &str) -> Result<Purpose, OracleError> {
    let prefix = key
        .split_once(':')
        .map(|(p, _)| p)
        .ok_or_else(|| OracleError::Fixture(format!("key {key:?} has no purpose prefix")))?;
    prefix.parse()
}

impl ReplayFixture {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_json(text: &str) -> Result<Self, OracleError> {
        let stored: StoredFixture =
            serde_json::from_str(text).map_err(|e| OracleError::Fixture(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for (key, entry) in stored.entries {
            let response = match entry {
                StoredEntry::Response(r) => r,
                StoredEntry::Reply(raw) => parse_reply(purpose_of_key(&key)?, &raw)?,
            };
            entries.insert(key, response);
        }
        Ok(ReplayFixture {
            recorded_from: stored.recorded_from,
            entries,
        })
    }

    pub fn to_json(&self) -> String {
        let stored = StoredFixture {
            recorded_from: self.recorded_from.clone(),
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), StoredEntry::Response(v.clone())))
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&stored).expect("fixture serializes");
        text.push('\n');
        text
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, OracleError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), OracleError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Exact-key entry first, then the context-free entry.
    pub fn lookup(&self, req: &OracleRequest) -> Option<&OracleResponse> {
        self.entries
            .get(&req.key())
            .or_else(|| self.entries.get(&req.context_free_key()))
    }

    pub fn record(&mut self, req: &OracleRequest, response: OracleResponse) {
        self.entries.insert(req.key(), response);
    }

    /// Adds a context-free entry from a raw reply.
    pub fn insert_reply(&mut self, purpose: Purpose, goal: &str, raw: &str) -> Result<&mut Self, OracleError> {
        let response = parse_reply(purpose, raw)?;
        self.entries
            .insert(OracleRequest::new(purpose, goal).context_free_key(), response);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Answers from a fixture only.
#[derive(Debug, Clone)]
pub struct ReplayOracle {
    fixture: ReplayFixture,
}

impl ReplayOracle {
    pub fn new(fixture: ReplayFixture) -> Self {
        ReplayOracle { fixture }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, OracleError> {
        Ok(Self::new(ReplayFixture::load(path)?))
    }

    pub fn fixture(&self) -> &ReplayFixture {
        &self.fixture
    }
}

impl Oracle for ReplayOracle {
    fn ask(&self, req: &OracleRequest) -> Result<OracleResponse, OracleError> {
        self.fixture
            .lookup(req)
            .cloned()
            .ok_or_else(|| OracleError::MissingFixture(req.key()))
    }
}

/// Wraps another oracle and records every exchange under its exact key,
/// rewriting the fixture file after each successful call.
pub struct CaptureOracle<O> {
    inner: O,
    path: PathBuf,
    fixture: Mutex<ReplayFixture>,
}

impl<O: Oracle> CaptureOracle<O> {
    pub fn new(inner: O, path: impl Into<PathBuf>, recorded_from: Option<String>) -> Self {
        CaptureOracle {
            inner,
            path: path.into(),
            fixture: Mutex::new(ReplayFixture {
                recorded_from,
                entries: BTreeMap::new(),
            }),
        }
    }

    pub fn fixture(&self) -> ReplayFixture {
        self.fixture.lock().unwrap().clone()
    }
}

impl<O: Oracle> Oracle for CaptureOracle<O> {
    fn ask(&self, req: &OracleRequest) -> Result<OracleResponse, OracleError> {
        let response = self.inner.ask(req)?;
        let mut fixture = self.fixture.lock().unwrap();
        fixture.record(req, response.clone());
        fixture.save(&self.path)?;
        Ok(response)
    }
}
