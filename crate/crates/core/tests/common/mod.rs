#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use logicgen::dcg::{build_qatree, generate_language, read_dcg, render_dcg, tree_to_dcg, GO_DRIVER};
use logicgen::explore::{explore, Agent, ExplorationConfig, ExploreError, HornShape};
use logicgen::fixpoint::prove_text;
use logicgen::oracle::{Purpose, ReplayFixture, ReplayOracle};
use logicgen::soft::{export_abduced, soft_unify, AbducedLedger, HashingBackend, SentenceStore, SoftQuery};
use logicgen::{Program, ProgramBuilder, ProgramKind};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

/// A Horn clause over atoms `0..n`; `None` as head is `false`, an empty body
/// is a fact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawClause {
    pub head: Option<usize>,
    pub body: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RawProgram {
    pub atoms: usize,
    pub clauses: Vec<RawClause>,
}

pub fn atom_name(i: usize) -> String {
    format!("a{i}")
}

impl RawProgram {
    pub fn build(&self) -> Program {
        let mut b = ProgramBuilder::horn();
        for i in 0..self.atoms {
            b.intern(&atom_name(i)).unwrap();
        }
        for c in &self.clauses {
            let head = c.head.map(atom_name).unwrap_or_else(|| "false".into());
            if c.body.is_empty() {
                b.fact(&head).unwrap();
            } else {
                let body: Vec<String> = c.body.iter().map(|&i| atom_name(i)).collect();
                let refs: Vec<&str> = body.iter().map(String::as_str).collect();
                b.rule(&head, &refs).unwrap();
            }
        }
        b.build_allow_empty()
    }

    /// Least model of the definite part by repeated full scans, and whether
    /// some constraint body holds in it.
    pub fn naive_least_model(&self) -> (BTreeSet<usize>, bool) {
        let mut model = vec![false; self.atoms];
        loop {
            let mut changed = false;
            for c in &self.clauses {
                if let Some(h) = c.head {
                    if !model[h] && c.body.iter().all(|&b| model[b]) {
                        model[h] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let violated = self
            .clauses
            .iter()
            .any(|c| c.head.is_none() && c.body.iter().all(|&b| model[b]));
        ((0..self.atoms).filter(|&i| model[i]).collect(), violated)
    }

    /// Intersection of all models of the definite part, and whether the whole
    /// program (constraints included) has no model, by enumerating every
    /// assignment. Only for `atoms <= 20`.
    pub fn brute_force(&self) -> (BTreeSet<usize>, bool) {
        assert!(self.atoms <= 20);
        let masks: Vec<(Option<usize>, u32)> = self
            .clauses
            .iter()
            .map(|c| (c.head, c.body.iter().fold(0u32, |m, &b| m | (1 << b))))
            .collect();
        let mut meet = u32::MAX;
        let mut any_full_model = false;
        for assign in 0u32..(1u32 << self.atoms) {
            let mut definite_ok = true;
            let mut constraints_ok = true;
            for &(head, body) in &masks {
                if assign & body != body {
                    continue;
                }
                match head {
                    Some(h) if assign & (1 << h) == 0 => {
                        definite_ok = false;
                        break;
                    }
                    None => constraints_ok = false,
                    _ => {}
                }
            }
            if definite_ok {
                meet &= assign;
                if constraints_ok {
                    any_full_model = true;
                }
            }
        }
        ((0..self.atoms).filter(|&i| meet & (1 << i) != 0).collect(), !any_full_model)
    }
}

/// Model atoms of a built program as raw indices.
pub fn model_indices(p: &Program, atoms: &[logicgen::Atom]) -> BTreeSet<usize> {
    atoms
        .iter()
        .map(|&a| p.text(a)[1..].parse::<usize>().unwrap())
        .collect()
}

pub fn random_program(rng: &mut StdRng, atoms: std::ops::RangeInclusive<usize>, max_clauses: usize) -> RawProgram {
    let n = rng.gen_range(atoms);
    let m = rng.gen_range(1..=max_clauses);
    let clauses = (0..m)
        .map(|_| {
            let head = if rng.gen_bool(0.08) { None } else { Some(rng.gen_range(0..n)) };
            let len = if rng.gen_bool(0.2) { 0 } else { rng.gen_range(1..=4) };
            let body = (0..len).map(|_| rng.gen_range(0..n)).collect();
            RawClause { head, body }
        })
        .collect::<Vec<_>>();
    let clauses = if clauses.iter().all(|c| c.head.is_none() && c.body.is_empty()) {
        vec![RawClause {
            head: Some(0),
            body: vec![],
        }]
    } else {
        clauses
    };
    RawProgram {
        atoms: n,
        clauses: clauses
            .into_iter()
            .filter(|c| c.head.is_some() || !c.body.is_empty())
            .collect(),
    }
}

pub fn raw_program_strategy(max_atoms: usize, max_clauses: usize) -> impl Strategy<Value = RawProgram> {
    (1..=max_atoms).prop_flat_map(move |n| {
        let clause = (
            prop::option::weighted(0.92, 0..n),
            prop::collection::vec(0..n, 0..=4),
        )
            .prop_filter_map("constraint without body", |(head, body)| {
                (head.is_some() || !body.is_empty()).then_some(RawClause { head, body })
            });
        prop::collection::vec(clause, 1..=max_clauses).prop_map(move |clauses| RawProgram { atoms: n, clauses })
    })
}

/// A dual clause over atoms `0..n`; an empty consequent list is `=> false`.
#[derive(Debug, Clone)]
pub struct RawDual {
    pub premise: usize,
    pub consequents: Vec<usize>,
}

pub fn dual_program_strategy(max_atoms: usize, max_clauses: usize) -> impl Strategy<Value = (usize, Vec<RawDual>)> {
    (1..=max_atoms).prop_flat_map(move |n| {
        let clause = (0..n, prop::collection::vec(0..n, 0..=3)).prop_map(|(premise, consequents)| RawDual { premise, consequents });
        (Just(n), prop::collection::vec(clause, 1..=max_clauses))
    })
}

pub fn build_dual(n: usize, clauses: &[RawDual]) -> Program {
    let mut b = ProgramBuilder::dual();
    for i in 0..n {
        b.intern(&atom_name(i)).unwrap();
    }
    for c in clauses {
        let consequents: Vec<String> = if c.consequents.is_empty() {
            vec!["false".into()]
        } else {
            c.consequents.iter().map(|&i| atom_name(i)).collect()
        };
        let refs: Vec<&str> = consequents.iter().map(String::as_str).collect();
        b.implies(&atom_name(c.premise), &refs).unwrap();
    }
    b.build().unwrap()
}

/// Follow-up graph over questions `Q0..Qn`: `followups[i]` only names
/// questions with a larger index, and `answers[i]` is the answer of `Qi`.
#[derive(Debug, Clone)]
pub struct QaDag {
    pub followups: Vec<BTreeSet<usize>>,
    pub answers: Vec<usize>,
}

pub fn question(i: usize) -> String {
    format!("Q{i}?")
}

pub fn answer(i: usize) -> String {
    format!("A{i}.")
}

impl QaDag {
    pub fn random(rng: &mut StdRng) -> QaDag {
        let n = rng.gen_range(2..12);
        let followups = (0..n)
            .map(|i| (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(i..=n)).filter(|&k| k > i && k < n).collect())
            .collect();
        let answers = (0..n).map(|_| rng.gen_range(0..n + 3)).collect();
        QaDag { followups, answers }
    }

    pub fn oracle(&self) -> ReplayOracle {
        let mut fx = ReplayFixture::new();
        for (i, kids) in self.followups.iter().enumerate() {
            fx.insert_reply(Purpose::Answer, &question(i), &answer(self.answers[i])).unwrap();
            // a childless question asks the root again, which is dropped as a loop
            let raw = if kids.is_empty() {
                question(0)
            } else {
                kids.iter().map(|&k| question(k)).collect::<Vec<_>>().join("\n")
            };
            fx.insert_reply(Purpose::Followups, &question(i), &raw).unwrap();
        }
        ReplayOracle::new(fx)
    }

    /// Children of `i` that become answered tree nodes below `path`.
    fn answered_children(&self, i: usize, depth: usize, limit: usize, path: &[usize]) -> Vec<usize> {
        self.followups[i]
            .iter()
            .copied()
            .filter(|&c| depth + 1 < limit && !path.contains(&self.answers[c]))
            .collect()
    }

    /// Root-to-leaf paths of answered nodes, by direct recursion.
    pub fn paths(&self, i: usize, depth: usize, limit: usize, path: &mut Vec<usize>) -> usize {
        path.push(self.answers[i]);
        let kids = self.answered_children(i, depth, limit, path);
        let n = if kids.is_empty() {
            1
        } else {
            kids.iter().map(|&c| self.paths(c, depth + 1, limit, path)).sum()
        };
        path.pop();
        n
    }

    /// Total occurrences of questions left open at the depth limit.
    pub fn opens(&self, i: usize, depth: usize, limit: usize, path: &mut Vec<usize>) -> usize {
        path.push(self.answers[i]);
        let n = if depth + 1 == limit {
            self.followups[i].len()
        } else {
            let kids = self.answered_children(i, depth, limit, path);
            kids.iter().map(|&c| self.opens(c, depth + 1, limit, path)).sum()
        };
        path.pop();
        n
    }

    /// Builds the tree through the replay oracle and compares the language
    /// and the open counts with the recursions above.
    pub fn check(&self, limit: usize) -> Result<(), String> {
        let tree = build_qatree(&question(0), limit, &self.oracle()).map_err(|e| e.to_string())?;
        let g = tree_to_dcg(&tree);
        if !g.is_acyclic() {
            return Err("cyclic grammar".into());
        }
        let rendered = render_dcg(&g);
        let reread = read_dcg(&rendered).map_err(|e| e.to_string())?;
        let sentences = generate_language(&reread);
        let expected = self.paths(0, 0, limit, &mut Vec::new());
        if sentences.len() != expected {
            return Err(format!("{} sentences, {expected} paths", sentences.len()));
        }
        if generate_language(&g) != sentences {
            return Err("grammar changed by render/read".into());
        }
        let opens: usize = g.opens.values().sum();
        let expected = self.opens(0, 0, limit, &mut Vec::new());
        if opens != expected {
            return Err(format!("{opens} opens, expected {expected}"));
        }
        for s in &sentences {
            let answers: Vec<&String> = s.iter().skip(1).step_by(2).collect();
            let distinct: BTreeSet<&&String> = answers.iter().collect();
            if s.is_empty() || s.len() % 2 != 0 || distinct.len() != answers.len() {
                return Err(format!("malformed sentence {s:?}"));
            }
        }
        if !rendered.trim_end().ends_with(GO_DRIVER) {
            return Err("missing driver".into());
        }
        Ok(())
    }
}

/// Expansion tree with unique item names, `children[i]` listing the
/// children of node `i`, and a rating per node.
#[derive(Debug, Clone)]
pub struct RatedTree {
    pub children: Vec<Vec<usize>>,
    pub ratings: Vec<u8>,
}

pub fn node(i: usize) -> String {
    format!("node {i}")
}

impl RatedTree {
    /// `parents[i]` and `ratings[i]` describe node `i + 1`; parents are
    /// reduced modulo the number of earlier nodes.
    pub fn from_parents(spec: &[(usize, u8)]) -> RatedTree {
        let mut children = vec![Vec::new()];
        let mut ratings = vec![100];
        for (i, &(parent, rating)) in spec.iter().enumerate() {
            children[parent % (i + 1)].push(i + 1);
            children.push(Vec::new());
            ratings.push(rating);
        }
        RatedTree { children, ratings }
    }

    pub fn oracle(&self) -> ReplayOracle {
        let mut fx = ReplayFixture::new();
        for (i, kids) in self.children.iter().enumerate() {
            // a leaf proposes the root again, which is only referenced
            let raw = if kids.is_empty() {
                node(0)
            } else {
                kids.iter().map(|&k| node(k)).collect::<Vec<_>>().join("\n")
            };
            fx.insert_reply(Purpose::Expand, &node(i), &raw).unwrap();
            fx.insert_reply(Purpose::Rate, &node(i), &self.ratings[i].to_string()).unwrap();
        }
        ReplayOracle::new(fx)
    }
}

/// Every (head, item) pair of the program's clauses; frontier clauses pair
/// the item with `true` or `false`.
pub fn links(p: &Program) -> BTreeSet<(String, String)> {
    p.clause_texts()
        .into_iter()
        .flat_map(|(h, items)| items.into_iter().map(move |i| (h.clone(), i)))
        .collect()
}

pub fn rated(mut cfg: ExplorationConfig, threshold: f64) -> ExplorationConfig {
    cfg.agent = Agent::Rater;
    cfg.rater_threshold = threshold;
    cfg
}

/// Explores `cfg` at thresholds `lo <= hi` and checks that the higher one
/// keeps a subset of the links, and of the clauses for disjunctive Horn.
pub fn check_rater_monotone(cfg: &ExplorationConfig, oracle: &ReplayOracle, lo: f64, hi: f64) -> Result<(), String> {
    let low = explore(&rated(cfg.clone(), lo), oracle);
    let high = explore(&rated(cfg.clone(), hi), oracle);
    match (low, high) {
        (Ok((pl, _)), Ok((ph, _))) => {
            if !links(&ph).is_subset(&links(&pl)) {
                return Err(format!("links grew from {lo} to {hi}"));
            }
            let clauses = |p: &Program| p.clause_texts().into_iter().collect::<BTreeSet<_>>();
            if cfg.mode == ProgramKind::Horn && cfg.horn_shape == HornShape::Disjunctive && !clauses(&ph).is_subset(&clauses(&pl)) {
                return Err(format!("clauses grew from {lo} to {hi}"));
            }
            Ok(())
        }
        (Ok(_), Err(ExploreError::NothingAccepted { .. })) => Ok(()),
        (Err(ExploreError::NothingAccepted { .. }), Err(ExploreError::NothingAccepted { .. })) => Ok(()),
        (l, h) => Err(format!("low {:?} high {:?}", l.err(), h.err())),
    }
}

pub const WORDS: &[&str] = &[
    "you", "know", "where", "going", "end", "up", "somewhere", "else", "road", "any", "will", "take", "there", "be",
    "yourself", "everyone", "taken", "future", "present", "past",
];

pub fn random_sentence(rng: &mut StdRng) -> String {
    let n = rng.gen_range(1..7);
    (0..n).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect::<Vec<_>>().join(" ")
}

/// Answers of `query` in an abduced program: bodies of its rules that the
/// program proves.
pub fn program_answers(p: &Program, query: &str) -> BTreeSet<String> {
    p.clause_texts()
        .into_iter()
        .filter(|(h, body)| h == query && body.len() == 1 && body[0] != "true")
        .map(|(_, body)| body[0].clone())
        .filter(|s| prove_text(p, s).unwrap())
        .collect()
}

/// Soft-unifies every query against a store of `sentences`, exports the
/// ledger and checks that the program proves exactly the answered queries
/// with the same answers.
pub fn check_soft_batch(sentences: &[String], queries: &[(String, usize, u32)]) -> Result<(), String> {
    let backend = HashingBackend::default();
    let mut store = SentenceStore::for_backend(&backend);
    store.add_sentences(&backend, sentences).map_err(|e| e.to_string())?;
    let mut ledger = AbducedLedger::new();
    // a query asked twice answers with the union of its hits
    let mut expected: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (q, k, d) in queries {
        let hits = soft_unify(&store, &backend, Some(&mut ledger), &SoftQuery::new(q.clone(), *k, *d)).map_err(|e| e.to_string())?;
        expected.entry(q.clone()).or_default().extend(hits.into_iter().map(|(s, _)| s));
    }
    let reloaded = AbducedLedger::from_json(&ledger.to_json()).map_err(|e| e.to_string())?;
    if reloaded != ledger {
        return Err("ledger changed by its JSON round trip".into());
    }
    let (program, annotated) = export_abduced(&ledger);
    for (q, hits) in &expected {
        let proved = program.symbols().lookup(q).is_some() && prove_text(&program, q).unwrap();
        if proved != !hits.is_empty() {
            return Err(format!("query {q:?}: proved {proved}, {} answers", hits.len()));
        }
        let answers = program_answers(&program, q);
        if &answers != hits {
            return Err(format!("query {q:?}: program answers {answers:?}, soft answers {hits:?}"));
        }
    }
    if annotated.lines().filter(|l| l.contains(" :: ")).count() != ledger.len() {
        return Err("annotated listing and ledger differ in size".into());
    }
    Ok(())
}
