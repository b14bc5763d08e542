//! Compilation of Dual-Horn programs into definite Horn programs.
//!
//! `p => c1 ; ... ; cn` says that if `p` holds then one of the `ci` holds.
//! Its contrapositive says `p` is falsified once every `ci` is falsified.
//! Writing `F(x)` for the atom "x is falsified", every dual clause becomes the
//! definite clause `F(p) :- F(c1), ..., F(cn)` and, since `F(false) = true`,
//! a negative fact `p => false` becomes the fact `F(p) :- true`.
//!
//! A premise defined by several dual clauses is falsified as soon as the
//! consequents of any one of them are.

use std::collections::HashMap;

use thiserror::Error;

use crate::fixpoint::{self, SolveError};
use crate::program::{DualHornClause, HornClause, Program, ProgramBuilder, ProgramKind};
use crate::symbols::Atom;

/// Prefix naming the falsified counterpart of an atom.
pub const FALSIFIED_PREFIX: &str = "false:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualError {
    #[error("expected a dual program, got a {0} program")]
    NotDual(ProgramKind),
    #[error("goal {0:?} does not occur in the program")]
    UnknownGoal(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Source atom to falsified-counterpart atom of the compiled program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FalsificationMap {
    forward: Vec<Atom>,
    backward: HashMap<Atom, Atom>,
}

impl FalsificationMap {
    /// Counterpart of a source atom in the compiled program.
    pub fn falsified(&self, source: Atom) -> Option<Atom> {
        self.forward.get(source.index()).copied()
    }

    /// Source atom whose counterpart is `target`; `true` has no preimage.
    pub fn source_of(&self, target: Atom) -> Option<Atom> {
        self.backward.get(&target).copied()
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

/// Name of the falsified counterpart of `text`.
pub fn falsified_name(text: &str) -> String {
    format!("{FALSIFIED_PREFIX}{text}")
}

/// Contrapositive compilation of a dual program into a definite program.
pub fn contrapose(program: &Program) -> Result<(Program, FalsificationMap), DualError> {
    let clauses = program
        .dual_clauses()
        .ok_or(DualError::NotDual(program.kind()))?;
    let mut out = ProgramBuilder::horn();
    let mut forward = Vec::with_capacity(program.symbols().len());
    let mut backward = HashMap::new();
    for source in program.symbols().atoms() {
        let target = if source == Atom::FALSE {
            Atom::TRUE
        } else {
            let target = out
                .intern(&falsified_name(program.text(source)))
                .expect("source atoms are non-empty");
            backward.insert(target, source);
            target
        };
        forward.push(target);
    }

    for DualHornClause {
        premise,
        consequents,
    } in clauses
    {
        let clause = HornClause {
            head: forward[premise.index()],
            body: consequents.iter().map(|c| forward[c.index()]).collect(),
        };
        out.push_horn(clause)
            .expect("counterparts of dual clauses are valid Horn clauses");
    }

    Ok((out.build_allow_empty(), FalsificationMap { forward, backward }))
}

/// Whether `goal` is falsified: contraposition followed by a goal-directed
/// minimal-model run.
pub fn falsify(program: &Program, goal: &str) -> Result<bool, DualError> {
    let source = program
        .symbols()
        .lookup(goal)
        .ok_or_else(|| DualError::UnknownGoal(goal.trim().to_string()))?;
    let (compiled, map) = contrapose(program)?;
    let target = map.falsified(source).expect("every source atom is mapped");
    Ok(fixpoint::prove(&compiled, target)?)
}
