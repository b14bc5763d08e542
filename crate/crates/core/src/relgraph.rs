//! Relation graphs: implication edges read off a program, generalization
//! edges and subject/verb/object triplets obtained from an oracle, exported
//! as DOT or JSON.

use std::collections::HashSet;
use std::fmt::Write as _;

use indexmap::IndexSet;
use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle::{Oracle, OracleError, OracleRequest, Purpose};
use crate::program::{Clauses, Model, Program};
use crate::syntax::read_quoted;

/// Label of edges taken from clauses.
pub const IMPLIES: &str = ":";
/// Label of generalization edges.
pub const IS: &str = "is";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelEdge {
    pub source: String,
    pub label: String,
    pub target: String,
}

impl RelEdge {
    pub fn new(source: impl Into<String>, label: impl Into<String>, target: impl Into<String>) -> Self {
        RelEdge {
            source: source.into(),
            label: label.into(),
            target: target.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SvoTriple {
    pub subject: String,
    pub verb: String,
    pub object: String,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("malformed graph JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Edges `body -> head` of Horn clauses and `premise -> consequent` of dual
/// clauses, labelled `:`. `true` and `false` never appear. With a filter,
/// only edges whose endpoints both pass it are kept.
pub fn implication_edges(p: &Program, keep: Option<&HashSet<String>>) -> Vec<RelEdge> {
    let mut edges = Vec::new();
    let mut push = |from: crate::Atom, to: crate::Atom| {
        if from.is_reserved() || to.is_reserved() {
            return;
        }
        let (from, to) = (p.text(from), p.text(to));
        if let Some(keep) = keep {
            if !keep.contains(from) || !keep.contains(to) {
                return;
            }
        }
        edges.push(RelEdge::new(from, IMPLIES, to));
    };
    match p.clauses() {
        Clauses::Horn(cs) => {
            for c in cs {
                for &b in &c.body {
                    push(b, c.head);
                }
            }
        }
        Clauses::Dual(cs) => {
            for c in cs {
                for &x in &c.consequents {
                    push(c.premise, x);
                }
            }
        }
    }
    edges
}

/// [`implication_edges`] restricted to the true atoms of `model`.
pub fn implication_edges_in_model(p: &Program, model: &Model) -> Vec<RelEdge> {
    let keep: HashSet<String> = model.texts(p.symbols()).into_iter().map(str::to_string).collect();
    implication_edges(p, Some(&keep))
}

/// Atom texts listed in a model file: `'a'.` and `'a' => false.` lines.
/// Comments and other lines are ignored.
pub fn model_file_atoms(text: &str) -> HashSet<String> {
    let mut atoms = HashSet::new();
    for line in text.lines() {
        let line = line.trim();
        if let Ok((atom, rest)) = read_quoted(line) {
            let rest = rest.trim();
            if rest == "." || rest == "=> false." {
                atoms.insert(atom.trim().to_string());
            }
        }
    }
    atoms
}

fn strip_quotes(s: &str) -> String {
    let s = s.trim();
    if s.starts_with('\'') {
        if let Ok((inner, rest)) = read_quoted(s) {
            if rest.trim().is_empty() {
                return inner.trim().to_string();
            }
        }
    }
    ['"', '\'']
        .iter()
        .find_map(|q| s.strip_prefix(*q).and_then(|x| x.strip_suffix(*q)))
        .unwrap_or(s)
        .trim()
        .to_string()
}

fn strip_bullet(line: &str) -> &str {
    let line = line.trim();
    let line = line.trim_start_matches(['-', '*', '•', '+']).trim_start();
    let digits = line.find(|c: char| !c.is_ascii_digit()).unwrap_or(0);
    if digits > 0 && line[digits..].starts_with(['.', ')']) {
        line[digits + 1..].trim_start()
    } else {
        line
    }
}

/// `X is Y`, with either side optionally quoted.
pub fn parse_is_line(line: &str) -> Option<(String, String)> {
    let line = strip_bullet(line).trim_end_matches('.').trim();
    let (x, y) = if line.starts_with('\'') {
        let (x, rest) = read_quoted(line).ok()?;
        let y = rest.trim_start().strip_prefix("is ")?;
        (x.trim().to_string(), strip_quotes(y))
    } else {
        let (x, y) = line.split_once(" is ")?;
        (strip_quotes(x), strip_quotes(y))
    };
    (!x.is_empty() && !y.is_empty()).then_some((x, y))
}

/// `subject | verb | object`.
pub fn parse_svo_line(line: &str) -> Option<SvoTriple> {
    let parts: Vec<String> = strip_bullet(line).split('|').map(|p| strip_quotes(p.trim_end_matches('.'))).collect();
    match parts.as_slice() {
        [s, v, o] if !s.is_empty() && !v.is_empty() && !o.is_empty() => Some(SvoTriple {
            subject: s.clone(),
            verb: v.clone(),
            object: o.clone(),
        }),
        _ => None,
    }
}

/// Generalization edges with their count of skipped reply lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Generalizations {
    pub edges: Vec<RelEdge>,
    pub skipped: usize,
}

/// One `generalize` request per batch of `batch` atoms; every reply line of
/// the form `X is Y` becomes an `is` edge.
pub fn generalization_edges<O: Oracle + ?Sized>(atoms: &[String], batch: usize, oracle: &O) -> Result<Generalizations, GraphError> {
    let mut out = Generalizations::default();
    let mut seen = HashSet::new();
    for chunk in atoms.chunks(batch.max(1)) {
        let req = OracleRequest::new(Purpose::Generalize, chunk.join("\n"));
        let reply = oracle.ask(&req)?;
        for line in reply.raw.lines().filter(|l| !l.trim().is_empty()) {
            match parse_is_line(line) {
                Some((x, y)) => {
                    let edge = RelEdge::new(x, IS, y);
                    if seen.insert(edge.clone()) {
                        out.edges.push(edge);
                    }
                }
                None => out.skipped += 1,
            }
        }
    }
    if out.skipped > 0 {
        warn!("skipped {} unparseable generalization line(s)", out.skipped);
    }
    Ok(out)
}

/// Triplets of a sentence with the count of skipped reply lines.
pub fn svo_triples<O: Oracle + ?Sized>(sentence: &str, oracle: &O) -> Result<(Vec<SvoTriple>, usize), GraphError> {
    let reply = oracle.ask(&OracleRequest::new(Purpose::Svo, sentence))?;
    let mut triples = Vec::new();
    let mut skipped = 0;
    for line in reply.raw.lines().filter(|l| !l.trim().is_empty()) {
        match parse_svo_line(line) {
            Some(t) => triples.push(t),
            None => skipped += 1,
        }
    }
    Ok((triples, skipped))
}

/// Verb-labelled edges of triplets.
pub fn svo_edges(triples: &[SvoTriple]) -> Vec<RelEdge> {
    triples
        .iter()
        .map(|t| RelEdge::new(&t.subject, &t.verb, &t.object))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

impl std::str::FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(GraphFormat::Dot),
            "json" => Ok(GraphFormat::Json),
            other => Err(format!("unknown graph format {other:?}, expected dot or json")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub nodes: Vec<String>,
    pub edges: Vec<RelEdge>,
}

/// Nodes in order of first appearance as edge endpoints.
pub fn nodes(edges: &[RelEdge]) -> Vec<String> {
    let mut set = IndexSet::new();
    for e in edges {
        set.insert(e.source.as_str());
        set.insert(e.target.as_str());
    }
    set.into_iter().map(str::to_string).collect()
}

fn dot_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn export_graph(edges: &[RelEdge], format: GraphFormat) -> String {
    match format {
        GraphFormat::Dot => {
            let mut out = String::from("digraph relations {\n");
            for n in nodes(edges) {
                let _ = writeln!(out, "  {};", dot_string(&n));
            }
            for e in edges {
                let _ = writeln!(
                    out,
                    "  {} -> {} [label={}];",
                    dot_string(&e.source),
                    dot_string(&e.target),
                    dot_string(&e.label)
                );
            }
            out.push_str("}\n");
            out
        }
        GraphFormat::Json => {
            let g = GraphJson {
                nodes: nodes(edges),
                edges: edges.to_vec(),
            };
            let mut s = serde_json::to_string_pretty(&g).expect("graph serializes");
            s.push('\n');
            s
        }
    }
}

pub fn read_graph_json(text: &str) -> Result<GraphJson, GraphError> {
    Ok(serde_json::from_str(text)?)
}
