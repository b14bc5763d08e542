//! Recursive goal expansion through an oracle.
//!
//! Starting from an initiator goal, each goal above the depth limit is sent
//! to the oracle for expansion, the proposed items are optionally filtered by
//! a rater or an advisor, and the accepted items become the body (Horn mode)
//! or the consequents (dual mode) of a clause for the goal. Items reached at
//! the depth limit are emitted as facts (`i :- true`) or negative facts
//! (`i => false`). A goal is expanded at most once; later occurrences are
//! only referenced.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use indexmap::IndexSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, Engine, EngineError};
use crate::oracle::{accept, Oracle, OracleError, OracleRequest, Purpose};
use crate::program::{Program, ProgramBuilder, ProgramError, ProgramKind};
use crate::symbols::{FALSE_TEXT, TRUE_TEXT};
use crate::syntax::serialize_program;

/// Acceptance threshold applied to advisor verdicts.
pub const ADVISOR_THRESHOLD: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Agent {
    /// Accepts every proposed item.
    Recursor,
    /// Asks the oracle to approve each item.
    Advisor,
    /// Asks the oracle for a 0-100 rating and compares it to a threshold.
    Rater,
}

impl FromStr for Agent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "recursor" => Ok(Agent::Recursor),
            "advisor" => Ok(Agent::Advisor),
            "rater" => Ok(Agent::Rater),
            other => Err(format!("unknown agent {other:?}")),
        }
    }
}

/// How a Horn expansion is emitted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum HornShape {
    /// `g :- i1, ..., ik`: the items together accomplish the goal.
    #[default]
    Conjunctive,
    /// `g :- i1.` ... `g :- ik.`: any item accomplishes the goal.
    Disjunctive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationConfig {
    pub initiator: String,
    pub max_depth: usize,
    pub mode: ProgramKind,
    pub agent: Agent,
    pub rater_threshold: f64,
    pub max_branching: usize,
    pub horn_shape: HornShape,
}

impl ExplorationConfig {
    pub fn new(initiator: impl Into<String>, max_depth: usize, mode: ProgramKind) -> Self {
        ExplorationConfig {
            initiator: initiator.into(),
            max_depth,
            mode,
            agent: Agent::Recursor,
            rater_threshold: 50.0,
            max_branching: 5,
            horn_shape: HornShape::Conjunctive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationStep {
    pub depth: usize,
    pub goal: String,
    pub accepted: Vec<String>,
    pub rejected: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationTrace {
    pub steps: Vec<ExplorationStep>,
    /// Goals in the order they were first reached.
    pub visited: IndexSet<String>,
}

impl ExplorationTrace {
    /// Number of oracle expansions performed for `goal`.
    pub fn expansions_of(&self, goal: &str) -> usize {
        self.steps.iter().filter(|s| s.goal == goal).count()
    }
}

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("initiator goal is empty")]
    EmptyInitiator,
    #[error("rater threshold {0} outside [0, 100]")]
    BadThreshold(f64),
    #[error("max_branching must be positive")]
    ZeroBranching,
    #[error("oracle failed: {source}")]
    Oracle {
        source: OracleError,
        trace: Box<ExplorationTrace>,
    },
    #[error("no item was accepted for the initiator goal")]
    NothingAccepted { trace: Box<ExplorationTrace> },
    #[error(transparent)]
    Program(#[from] ProgramError),
}

impl ExploreError {
    /// Partial trace recorded before the failure, if any.
    pub fn trace(&self) -> Option<&ExplorationTrace> {
        match self {
            ExploreError::Oracle { trace, .. } | ExploreError::NothingAccepted { trace } => Some(trace),
            _ => None,
        }
    }
}

struct Explorer<'a, O: ?Sized> {
    cfg: &'a ExplorationConfig,
    oracle: &'a O,
    trace: ExplorationTrace,
    clauses: Vec<(String, Vec<String>)>,
    frontier: Vec<String>,
}

impl<O: Oracle + ?Sized> Explorer<'_, O> {
    fn fail(&mut self, source: OracleError) -> ExploreError {
        ExploreError::Oracle {
            source,
            trace: Box::new(std::mem::take(&mut self.trace)),
        }
    }

    fn mode_name(&self) -> &'static str {
        match self.cfg.mode {
            ProgramKind::Horn => "horn",
            ProgramKind::Dual => "dual",
        }
    }

    fn filter(&mut self, goal: &str, path: &[String], items: Vec<String>) -> Result<(Vec<String>, Vec<String>), ExploreError> {
        let (threshold, agent) = match self.cfg.agent {
            Agent::Recursor => return Ok((items, Vec::new())),
            Agent::Advisor => (ADVISOR_THRESHOLD, "advisor"),
            Agent::Rater => (self.cfg.rater_threshold, "rater"),
        };
        let mut context = path.to_vec();
        context.push(goal.to_string());
        let oracle = self.oracle;
        let ratings: Result<Vec<f64>, OracleError> = items
            .par_iter()
            .map(|item| {
                let req = OracleRequest::new(Purpose::Rate, item.clone())
                    .with_trace(context.clone())
                    .with_param("parent", goal)
                    .with_param("agent", agent);
                let response = oracle.ask(&req)?;
                response.rating.ok_or_else(|| OracleError::Unparseable {
                    purpose: Purpose::Rate,
                    raw: response.raw.clone(),
                })
            })
            .collect();
        let ratings = ratings.map_err(|e| self.fail(e))?;
        let mut accepted = Vec::new();
        let mut rejected = Vec::new();
        for (item, rating) in items.into_iter().zip(ratings) {
            if accept(rating, threshold).map_err(|e| self.fail(e))? {
                accepted.push(item);
            } else {
                rejected.push(item);
            }
        }
        Ok((accepted, rejected))
    }

    fn visit(&mut self, goal: &str, depth: usize, path: &mut Vec<String>) -> Result<(), ExploreError> {
        if depth >= self.cfg.max_depth {
            self.frontier.push(goal.to_string());
            return Ok(());
        }
        let req = OracleRequest::new(Purpose::Expand, goal)
            .with_trace(path.clone())
            .with_param("mode", self.mode_name());
        let response = self.oracle.ask(&req).map_err(|e| self.fail(e))?;

        let mut proposed: IndexSet<String> = IndexSet::new();
        let mut rejected = Vec::new();
        for item in response.items {
            let item = item.trim().to_string();
            if item.is_empty() || proposed.contains(&item) {
                continue;
            }
            if item == TRUE_TEXT || item == FALSE_TEXT {
                rejected.push(item);
            } else if proposed.len() < self.cfg.max_branching {
                proposed.insert(item);
            }
        }
        let (accepted, mut refused) = self.filter(goal, path, proposed.into_iter().collect())?;
        rejected.append(&mut refused);
        self.trace.steps.push(ExplorationStep {
            depth,
            goal: goal.to_string(),
            accepted: accepted.clone(),
            rejected,
        });

        if accepted.is_empty() {
            if depth == 0 {
                return Err(ExploreError::NothingAccepted {
                    trace: Box::new(std::mem::take(&mut self.trace)),
                });
            }
            return Ok(());
        }

        match (self.cfg.mode, self.cfg.horn_shape) {
            (ProgramKind::Horn, HornShape::Disjunctive) => {
                for item in &accepted {
                    self.clauses.push((goal.to_string(), vec![item.clone()]));
                }
            }
            _ => self.clauses.push((goal.to_string(), accepted.clone())),
        }

        path.push(goal.to_string());
        for item in accepted {
            if self.trace.visited.insert(item.clone()) {
                self.visit(&item, depth + 1, path)?;
            }
        }
        path.pop();
        Ok(())
    }

    fn program(&self) -> Result<Program, ExploreError> {
        let mut b = ProgramBuilder::new(self.cfg.mode);
        for (head, items) in &self.clauses {
            let items: Vec<&str> = items.iter().map(String::as_str).collect();
            match self.cfg.mode {
                ProgramKind::Horn => b.rule(head, &items)?,
                ProgramKind::Dual => b.implies(head, &items)?,
            };
        }
        for item in &self.frontier {
            match self.cfg.mode {
                ProgramKind::Horn => b.fact(item)?,
                ProgramKind::Dual => b.implies(item, &[FALSE_TEXT])?,
            };
        }
        Ok(b.build()?)
    }
}

/// Expands `cfg.initiator` through `oracle` and emits the resulting program.
pub fn explore<O: Oracle + ?Sized>(cfg: &ExplorationConfig, oracle: &O) -> Result<(Program, ExplorationTrace), ExploreError> {
    let initiator = cfg.initiator.trim();
    if initiator.is_empty() {
        return Err(ExploreError::EmptyInitiator);
    }
    if !(0.0..=100.0).contains(&cfg.rater_threshold) {
        return Err(ExploreError::BadThreshold(cfg.rater_threshold));
    }
    if cfg.max_branching == 0 {
        return Err(ExploreError::ZeroBranching);
    }
    let mut explorer = Explorer {
        cfg,
        oracle,
        trace: ExplorationTrace::default(),
        clauses: Vec::new(),
        frontier: Vec::new(),
    };
    explorer.trace.visited.insert(initiator.to_string());
    explorer.visit(initiator, 0, &mut Vec::new())?;
    let program = explorer.program()?;
    Ok((program, explorer.trace))
}

/// File stem for an initiator: its first word, lowercased.
pub fn default_stem(initiator: &str) -> String {
    let word: String = initiator
        .split(|c: char| !c.is_alphanumeric())
        .find(|w| !w.is_empty())
        .unwrap_or("program")
        .to_lowercase();
    word
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactPaths {
    pub program: PathBuf,
    pub trace: PathBuf,
    pub model: PathBuf,
}

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Writes `<stem>.pro`, `<stem>_trace.json` and `<stem>_model.pro` into `dir`.
pub fn save_artifacts(
    dir: &Path,
    stem: &str,
    program: &Program,
    trace: &ExplorationTrace,
    engine: Engine,
) -> Result<ArtifactPaths, ArtifactError> {
    fs::create_dir_all(dir)?;
    let paths = ArtifactPaths {
        program: dir.join(format!("{stem}.pro")),
        trace: dir.join(format!("{stem}_trace.json")),
        model: dir.join(format!("{stem}_model.pro")),
    };
    let model = engine::model_file(program, engine, &format!("{stem}.pro"))?;
    let mut trace_json = serde_json::to_string_pretty(trace).expect("trace serializes");
    trace_json.push('\n');
    fs::write(&paths.program, serialize_program(program))?;
    fs::write(&paths.trace, trace_json)?;
    fs::write(&paths.model, model)?;
    Ok(paths)
}
