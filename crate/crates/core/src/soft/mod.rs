//! Soft unification: a query sentence "unifies" with the stored sentences
//! among its `k` nearest neighbours whose cosine distance is at most
//! `d_percent / 100`. Every match is recorded in an [`AbducedLedger`] and can
//! be exported as the Horn clauses `query :- sentence` and `sentence :- true`,
//! so that the same answers are reproducible by the exact solver.

mod embed;
mod store;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::program::{Program, ProgramBuilder};
use crate::syntax::quote_atom;

pub use embed::{EmbedError, EmbeddingBackend, EmbeddingConfig, HashingBackend, HttpEmbedder};
pub use store::{cosine_distance, SentenceStore, SENTENCES_FILE, VECTORS_FILE};

#[derive(Debug, Error)]
pub enum SoftError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("embedding backend failed: {0}")]
    Backend(String),
    #[error("store was built with {store}, backend is {backend}")]
    Incompatible { store: String, backend: String },
    #[error("vector of dimension {found}, store dimension is {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the sentence store is empty")]
    EmptyStore,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("threshold {0} is outside 0..=100")]
    BadThreshold(u32),
    #[error("malformed store: {0}")]
    Format(String),
    #[error("malformed ledger: {0}")]
    Ledger(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftQuery {
    pub q: String,
    pub k: usize,
    /// Distance bound in percent.
    pub d_percent: u32,
}

impl SoftQuery {
    pub fn new(q: impl Into<String>, k: usize, d_percent: u32) -> Self {
        SoftQuery { q: q.into(), k, d_percent }
    }

    pub fn bound(&self) -> f64 {
        self.d_percent as f64 / 100.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub query: String,
    pub sentence: String,
    pub distance: f64,
}

/// Distances of every (query, sentence) match, keyed so that repeating a
/// query adds nothing new.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AbducedLedger {
    entries: IndexMap<(String, String), f64>,
}

#[derive(Serialize, Deserialize)]
struct LedgerFile {
    entries: Vec<LedgerEntry>,
}

impl AbducedLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, query: &str, sentence: &str, distance: f64) {
        self.entries.insert((query.to_string(), sentence.to_string()), distance);
    }

    pub fn get(&self, query: &str, sentence: &str) -> Option<f64> {
        self.entries.get(&(query.to_string(), sentence.to_string())).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = LedgerEntry> + '_ {
        self.entries.iter().map(|((q, s), &d)| LedgerEntry {
            query: q.clone(),
            sentence: s.clone(),
            distance: d,
        })
    }

    pub fn to_json(&self) -> String {
        let file = LedgerFile {
            entries: self.entries().collect(),
        };
        serde_json::to_string_pretty(&file).expect("ledger entries serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, SoftError> {
        let file: LedgerFile = serde_json::from_str(text)?;
        let mut ledger = AbducedLedger::new();
        for e in file.entries {
            ledger.record(&e.query, &e.sentence, e.distance);
        }
        Ok(ledger)
    }

    pub fn load(path: &Path) -> Result<Self, SoftError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Like [`load`](Self::load) but a missing file is an empty ledger.
    pub fn load_or_default(path: &Path) -> Result<Self, SoftError> {
        match fs::read_to_string(path) {
            Ok(text) => Self::from_json(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), SoftError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Neighbours of `sq.q` within the distance bound, nearest first. Matches
/// are recorded in `ledger` when one is given.
pub fn soft_unify<B: EmbeddingBackend + ?Sized>(
    store: &SentenceStore,
    backend: &B,
    ledger: Option<&mut AbducedLedger>,
    sq: &SoftQuery,
) -> Result<Vec<(String, f64)>, SoftError> {
    if sq.d_percent > 100 {
        return Err(SoftError::BadThreshold(sq.d_percent));
    }
    let bound = sq.bound();
    let hits: Vec<(String, f64)> = store
        .knn(backend, &sq.q, sq.k)?
        .into_iter()
        .filter(|(_, d)| *d <= bound)
        .collect();
    if let Some(ledger) = ledger {
        for (s, d) in &hits {
            ledger.record(&sq.q, s, *d);
        }
    }
    Ok(hits)
}

/// Probability attached to an abduced clause.
pub fn probability(distance: f64) -> f64 {
    (1.0 - distance).max(0.0)
}

/// The abduced Horn program and its annotated listing. Each ledger entry
/// contributes `query :- sentence` and the fact `sentence :- true`; in the
/// listing the rule is prefixed with `p ::` and facts are unannotated.
pub fn export_abduced(ledger: &AbducedLedger) -> (Program, String) {
    let mut builder = ProgramBuilder::horn();
    let mut annotated = String::from("% p = max(0, 1 - cosine distance)\n");
    let mut rules = std::collections::HashSet::new();
    let mut facts = std::collections::HashSet::new();
    for e in ledger.entries() {
        if rules.insert((e.query.clone(), e.sentence.clone())) {
            builder
                .rule(&e.query, &[&e.sentence])
                .expect("ledger texts are non-empty atoms");
            let _ = writeln!(
                annotated,
                "{:.4} :: {} :- {}.",
                probability(e.distance),
                quote_atom(&e.query),
                quote_atom(&e.sentence)
            );
        }
        if facts.insert(e.sentence.clone()) {
            builder.fact(&e.sentence).expect("ledger texts are non-empty atoms");
            let _ = writeln!(annotated, "{}.", quote_atom(&e.sentence));
        }
    }
    (builder.build_allow_empty(), annotated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixpoint::prove_text;

    fn store(texts: &[&str]) -> (SentenceStore, HashingBackend) {
        let b = HashingBackend::default();
        let mut s = SentenceStore::for_backend(&b);
        s.add_sentences(&b, &texts.iter().map(|t| t.to_string()).collect::<Vec<_>>()).unwrap();
        (s, b)
    }

    #[test]
    fn zero_threshold_without_exact_match_records_nothing() {
        let (s, b) = store(&["alpha beta", "gamma"]);
        let mut ledger = AbducedLedger::new();
        let hits = soft_unify(&s, &b, Some(&mut ledger), &SoftQuery::new("alpha", 2, 0)).unwrap();
        assert!(hits.is_empty());
        assert!(ledger.is_empty());
    }

    #[test]
    fn full_threshold_equals_knn() {
        let (s, b) = store(&["alpha beta", "gamma", "beta gamma"]);
        let hits = soft_unify(&s, &b, None, &SoftQuery::new("beta", 2, 100)).unwrap();
        assert_eq!(hits, s.knn(&b, "beta", 2).unwrap());
    }

    #[test]
    fn repeated_queries_are_idempotent() {
        let (s, b) = store(&["alpha beta", "beta"]);
        let mut ledger = AbducedLedger::new();
        let sq = SoftQuery::new("beta", 3, 80);
        soft_unify(&s, &b, Some(&mut ledger), &sq).unwrap();
        let n = ledger.len();
        soft_unify(&s, &b, Some(&mut ledger), &sq).unwrap();
        assert_eq!(ledger.len(), n);
    }

    #[test]
    fn export_of_one_entry() {
        let mut ledger = AbducedLedger::new();
        ledger.record("Q", "A", 0.25);
        let (p, text) = export_abduced(&ledger);
        assert_eq!(p.clause_texts().len(), 2);
        assert!(text.contains("0.7500 :: 'Q' :- 'A'.\n"));
        assert!(prove_text(&p, "Q").unwrap());
    }

    #[test]
    fn empty_ledger_exports_empty_program() {
        let (p, _) = export_abduced(&AbducedLedger::new());
        assert!(p.is_empty());
    }

    #[test]
    fn ledger_json_round_trip() {
        let mut ledger = AbducedLedger::new();
        ledger.record("q", "s1", 0.5);
        ledger.record("q", "s2", 0.125);
        assert_eq!(AbducedLedger::from_json(&ledger.to_json()).unwrap(), ledger);
    }

    #[test]
    fn bad_threshold() {
        let (s, b) = store(&["a"]);
        assert!(matches!(
            soft_unify(&s, &b, None, &SoftQuery::new("a", 1, 101)),
            Err(SoftError::BadThreshold(101))
        ));
    }
}
