//! Horn and Dual-Horn programs and the models computed from them.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbols::{Atom, SymbolError, SymbolTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProgramKind {
    Horn,
    Dual,
}

impl fmt::Display for ProgramKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgramKind::Horn => f.write_str("horn"),
            ProgramKind::Dual => f.write_str("dual"),
        }
    }
}

impl std::str::FromStr for ProgramKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "horn" => Ok(ProgramKind::Horn),
            "dual" => Ok(ProgramKind::Dual),
            other => Err(format!("unknown program kind {other:?}, expected horn or dual")),
        }
    }
}

/// `head :- body`. Facts carry the body `[true]`; a `false` head is an
/// integrity constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HornClause {
    pub head: Atom,
    pub body: Vec<Atom>,
}

/// `premise => c1 ; ... ; cn`. A negative fact has consequents `[false]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualHornClause {
    pub premise: Atom,
    pub consequents: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clauses {
    Horn(Vec<HornClause>),
    Dual(Vec<DualHornClause>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("program has no clauses")]
    Empty,
    #[error("'true' cannot be the head of a Horn clause")]
    TrueHead,
    #[error("'false' cannot be the premise of a Dual-Horn clause")]
    FalsePremise,
    #[error("clause body is empty")]
    EmptyBody,
    #[error("clause has no consequents")]
    EmptyConsequents,
    #[error("cannot add a {found} clause to a {expected} program")]
    KindMismatch {
        expected: ProgramKind,
        found: ProgramKind,
    },
    #[error("atom {0} is not in the symbol table")]
    UnknownAtom(Atom),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// A homogeneous list of clauses together with the table interning its atoms.
///
/// Programs are immutable once built; use [`ProgramBuilder`] to make one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    symbols: SymbolTable,
    clauses: Clauses,
}

impl Program {
    pub fn kind(&self) -> ProgramKind {
        match self.clauses {
            Clauses::Horn(_) => ProgramKind::Horn,
            Clauses::Dual(_) => ProgramKind::Dual,
        }
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn clauses(&self) -> &Clauses {
        &self.clauses
    }

    pub fn horn_clauses(&self) -> Option<&[HornClause]> {
        match &self.clauses {
            Clauses::Horn(c) => Some(c),
            Clauses::Dual(_) => None,
        }
    }

    pub fn dual_clauses(&self) -> Option<&[DualHornClause]> {
        match &self.clauses {
            Clauses::Dual(c) => Some(c),
            Clauses::Horn(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        match &self.clauses {
            Clauses::Horn(c) => c.len(),
            Clauses::Dual(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn text(&self, atom: Atom) -> &str {
        self.symbols.text(atom)
    }

    /// Clauses rendered with atom texts, for structural comparison across
    /// programs whose symbol tables differ.
    pub fn clause_texts(&self) -> Vec<(String, Vec<String>)> {
        let texts = |atoms: &[Atom]| atoms.iter().map(|&a| self.text(a).to_string()).collect();
        match &self.clauses {
            Clauses::Horn(cs) => cs
                .iter()
                .map(|c| (self.text(c.head).to_string(), texts(&c.body)))
                .collect(),
            Clauses::Dual(cs) => cs
                .iter()
                .map(|c| (self.text(c.premise).to_string(), texts(&c.consequents)))
                .collect(),
        }
    }
}

/// Incremental construction of a [`Program`] of a fixed kind.
#[derive(Debug, Clone)]
pub struct ProgramBuilder {
    symbols: SymbolTable,
    clauses: Clauses,
}

impl ProgramBuilder {
    pub fn new(kind: ProgramKind) -> Self {
        let clauses = match kind {
            ProgramKind::Horn => Clauses::Horn(Vec::new()),
            ProgramKind::Dual => Clauses::Dual(Vec::new()),
        };
        ProgramBuilder {
            symbols: SymbolTable::new(),
            clauses,
        }
    }

    pub fn horn() -> Self {
        Self::new(ProgramKind::Horn)
    }

    pub fn dual() -> Self {
        Self::new(ProgramKind::Dual)
    }

    pub fn kind(&self) -> ProgramKind {
        match self.clauses {
            Clauses::Horn(_) => ProgramKind::Horn,
            Clauses::Dual(_) => ProgramKind::Dual,
        }
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn intern(&mut self, text: &str) -> Result<Atom, SymbolError> {
        self.symbols.intern(text)
    }

    pub fn len(&self) -> usize {
        match &self.clauses {
            Clauses::Horn(c) => c.len(),
            Clauses::Dual(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Adds `head :- body` by text.
    pub fn rule(&mut self, head: &str, body: &[&str]) -> Result<&mut Self, ProgramError> {
        let head = self.symbols.intern(head)?;
        let body = body
            .iter()
            .map(|b| self.symbols.intern(b))
            .collect::<Result<Vec<_>, _>>()?;
        self.push_horn(HornClause { head, body })?;
        Ok(self)
    }

    /// Adds `head :- true`.
    pub fn fact(&mut self, head: &str) -> Result<&mut Self, ProgramError> {
        self.rule(head, &["true"])
    }

    /// Adds `premise => c1 ; ... ; cn` by text.
    pub fn implies(&mut self, premise: &str, consequents: &[&str]) -> Result<&mut Self, ProgramError> {
        let premise = self.symbols.intern(premise)?;
        let consequents = consequents
            .iter()
            .map(|c| self.symbols.intern(c))
            .collect::<Result<Vec<_>, _>>()?;
        self.push_dual(DualHornClause {
            premise,
            consequents,
        })?;
        Ok(self)
    }

    pub fn push_horn(&mut self, clause: HornClause) -> Result<(), ProgramError> {
        if clause.head == Atom::TRUE {
            return Err(ProgramError::TrueHead);
        }
        if clause.body.is_empty() {
            return Err(ProgramError::EmptyBody);
        }
        self.check_known(std::iter::once(clause.head).chain(clause.body.iter().copied()))?;
        match &mut self.clauses {
            Clauses::Horn(cs) => {
                cs.push(clause);
                Ok(())
            }
            Clauses::Dual(_) => Err(ProgramError::KindMismatch {
                expected: ProgramKind::Dual,
                found: ProgramKind::Horn,
            }),
        }
    }

    pub fn push_dual(&mut self, clause: DualHornClause) -> Result<(), ProgramError> {
        if clause.premise == Atom::FALSE {
            return Err(ProgramError::FalsePremise);
        }
        if clause.consequents.is_empty() {
            return Err(ProgramError::EmptyConsequents);
        }
        self.check_known(std::iter::once(clause.premise).chain(clause.consequents.iter().copied()))?;
        match &mut self.clauses {
            Clauses::Dual(cs) => {
                cs.push(clause);
                Ok(())
            }
            Clauses::Horn(_) => Err(ProgramError::KindMismatch {
                expected: ProgramKind::Horn,
                found: ProgramKind::Dual,
            }),
        }
    }

    fn check_known(&self, mut atoms: impl Iterator<Item = Atom>) -> Result<(), ProgramError> {
        match atoms.find(|&a| !self.symbols.contains(a)) {
            Some(a) => Err(ProgramError::UnknownAtom(a)),
            None => Ok(()),
        }
    }

    pub fn build(self) -> Result<Program, ProgramError> {
        if self.is_empty() {
            return Err(ProgramError::Empty);
        }
        Ok(self.build_allow_empty())
    }

    /// Builds without the non-empty check; generated programs (abduction
    /// ledgers, contrapositions) may legitimately have no clauses.
    pub fn build_allow_empty(self) -> Program {
        Program {
            symbols: self.symbols,
            clauses: self.clauses,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Satisfiable,
    Unsatisfiable,
}

/// Result of a minimal-model computation.
///
/// `true_atoms` holds the non-reserved atoms of the model in ascending id
/// order. The reserved atoms are answered by [`Model::contains`]: `true`
/// always holds and `false` holds exactly when the status is unsatisfiable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    true_atoms: Vec<Atom>,
    pub status: Status,
    pub proved_goal: Option<Atom>,
}

impl Model {
    pub fn new(mut true_atoms: Vec<Atom>, status: Status, proved_goal: Option<Atom>) -> Self {
        true_atoms.retain(|a| !a.is_reserved());
        true_atoms.sort_unstable();
        true_atoms.dedup();
        Model {
            true_atoms,
            status,
            proved_goal,
        }
    }

    pub fn true_atoms(&self) -> &[Atom] {
        &self.true_atoms
    }

    pub fn is_satisfiable(&self) -> bool {
        self.status == Status::Satisfiable
    }

    pub fn contains(&self, atom: Atom) -> bool {
        match atom {
            Atom::TRUE => true,
            Atom::FALSE => self.status == Status::Unsatisfiable,
            _ => self.true_atoms.binary_search(&atom).is_ok(),
        }
    }

    pub fn texts<'a>(&self, symbols: &'a SymbolTable) -> Vec<&'a str> {
        self.true_atoms.iter().map(|&a| symbols.text(a)).collect()
    }

    pub fn len(&self) -> usize {
        self.true_atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.true_atoms.is_empty()
    }
}
