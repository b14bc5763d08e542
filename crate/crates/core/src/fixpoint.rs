//! Minimal models of Horn programs by counting propagation.
//!
//! Each clause keeps the number of distinct body atoms not yet known to be
//! true; each atom keeps the clauses whose body mentions it. Proving an atom
//! decrements the counters of its watching clauses and a clause whose counter
//! reaches zero proves its head. Total work is linear in program size.

use std::collections::VecDeque;

use thiserror::Error;

use crate::program::{Model, Program, Status};
use crate::symbols::Atom;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverOptions {
    /// Discard the whole model when an integrity constraint fires.
    pub strict_integrity: bool,
    /// Return as soon as this atom is derived.
    pub stop_at_goal: Option<Atom>,
}

impl SolverOptions {
    pub fn strict() -> Self {
        SolverOptions {
            strict_integrity: true,
            stop_at_goal: None,
        }
    }

    pub fn with_goal(goal: Atom) -> Self {
        SolverOptions {
            strict_integrity: false,
            stop_at_goal: Some(goal),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("the fixpoint solver needs a Horn program")]
    NotHorn,
    #[error("goal {0} is not an atom of the program")]
    UnknownGoal(Atom),
    #[error("goal {0:?} is not an atom of the program")]
    UnknownGoalText(String),
}

/// Per-clause body counters and per-atom watch lists in compressed form.
#[derive(Debug, Clone)]
pub struct ClauseCounters {
    heads: Vec<Atom>,
    remaining: Vec<u32>,
    watch_offsets: Vec<u32>,
    watch: Vec<u32>,
}

impl ClauseCounters {
    pub fn new(program: &Program) -> Result<Self, SolveError> {
        let clauses = program.horn_clauses().ok_or(SolveError::NotHorn)?;
        let n_atoms = program.symbols().len();
        let mut heads = Vec::with_capacity(clauses.len());
        let mut remaining = Vec::with_capacity(clauses.len());
        let mut counts = vec![0u32; n_atoms + 1];
        let mut bodies: Vec<Atom> = Vec::new();
        let mut body_offsets = Vec::with_capacity(clauses.len() + 1);
        body_offsets.push(0usize);

        for clause in clauses {
            let start = bodies.len();
            bodies.extend_from_slice(&clause.body);
            let body = &mut bodies[start..];
            if body.len() > 1 {
                body.sort_unstable();
            }
            let mut distinct = 0;
            let mut last = None;
            for i in 0..body.len() {
                if last != Some(body[i]) {
                    last = Some(body[i]);
                    body[distinct] = body[i];
                    distinct += 1;
                }
            }
            bodies.truncate(start + distinct);
            for &b in &bodies[start..] {
                counts[b.index() + 1] += 1;
            }
            heads.push(clause.head);
            remaining.push(distinct as u32);
            body_offsets.push(bodies.len());
        }

        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let watch_offsets = counts.clone();
        let mut fill = counts;
        let mut watch = vec![0u32; bodies.len()];
        for (ci, window) in body_offsets.windows(2).enumerate() {
            for &b in &bodies[window[0]..window[1]] {
                let slot = &mut fill[b.index()];
                watch[*slot as usize] = ci as u32;
                *slot += 1;
            }
        }

        Ok(ClauseCounters {
            heads,
            remaining,
            watch_offsets,
            watch,
        })
    }

    pub fn watchers(&self, atom: Atom) -> &[u32] {
        let i = atom.index();
        &self.watch[self.watch_offsets[i] as usize..self.watch_offsets[i + 1] as usize]
    }

    /// Clauses whose body is not yet fully proven.
    pub fn remaining(&self) -> &[u32] {
        &self.remaining
    }
}

/// Least model of a Horn program.
///
/// A fired integrity constraint makes the status unsatisfiable; the model is
/// kept unless `strict_integrity` is set. When `stop_at_goal` is derived the
/// run stops at once with `proved_goal` set, the atoms derived so far and the
/// status observed so far. A goal proof is never discarded by a contradiction.
pub fn minimal_model(program: &Program, opts: SolverOptions) -> Result<Model, SolveError> {
    let n_atoms = program.symbols().len();
    if let Some(goal) = opts.stop_at_goal {
        if !program.symbols().contains(goal) {
            return Err(SolveError::UnknownGoal(goal));
        }
    }
    let mut counters = ClauseCounters::new(program)?;
    let mut in_model = vec![false; n_atoms];
    let mut queue = VecDeque::new();
    let mut contradiction = false;

    in_model[Atom::TRUE.index()] = true;
    queue.push_back(Atom::TRUE);
    if opts.stop_at_goal == Some(Atom::TRUE) {
        return Ok(Model::new(Vec::new(), Status::Satisfiable, Some(Atom::TRUE)));
    }

    while let Some(atom) = queue.pop_front() {
        let mut goal_hit = false;
        for i in counters.watch_offsets[atom.index()]..counters.watch_offsets[atom.index() + 1] {
            let ci = counters.watch[i as usize] as usize;
            counters.remaining[ci] -= 1;
            if counters.remaining[ci] != 0 {
                continue;
            }
            let head = counters.heads[ci];
            if head == Atom::FALSE {
                contradiction = true;
            } else if !in_model[head.index()] {
                in_model[head.index()] = true;
                queue.push_back(head);
                if opts.stop_at_goal == Some(head) {
                    goal_hit = true;
                }
            }
        }
        if goal_hit {
            let status = if contradiction {
                Status::Unsatisfiable
            } else {
                Status::Satisfiable
            };
            return Ok(Model::new(collect(&in_model), status, opts.stop_at_goal));
        }
    }

    if contradiction {
        let atoms = if opts.strict_integrity {
            Vec::new()
        } else {
            collect(&in_model)
        };
        Ok(Model::new(atoms, Status::Unsatisfiable, None))
    } else {
        Ok(Model::new(collect(&in_model), Status::Satisfiable, None))
    }
}

fn collect(in_model: &[bool]) -> Vec<Atom> {
    in_model
        .iter()
        .enumerate()
        .skip(2)
        .filter(|(_, &t)| t)
        .map(|(i, _)| Atom(i as u32))
        .collect()
}

/// Whether `goal` belongs to the least model, stopping early once it does.
pub fn prove(program: &Program, goal: Atom) -> Result<bool, SolveError> {
    if goal == Atom::FALSE {
        let model = minimal_model(program, SolverOptions::default())?;
        return Ok(!model.is_satisfiable());
    }
    let model = minimal_model(program, SolverOptions::with_goal(goal))?;
    Ok(model.proved_goal.is_some())
}

/// [`prove`] by atom text; unknown texts are an error.
pub fn prove_text(program: &Program, goal: &str) -> Result<bool, SolveError> {
    match program.symbols().lookup(goal) {
        Some(atom) => prove(program, atom),
        None => Err(SolveError::UnknownGoalText(goal.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::json::load_json_program;
    use crate::program::ProgramBuilder;

    fn paper_program() -> Program {
        load_json_program(r#"[["p",["q"]],["p",["r"]],["q",["r","s"]],["r",["true"]],["false",["q"]]]"#).unwrap()
    }

    #[test]
    fn paper_program_model_is_p_r() {
        let p = paper_program();
        let m = minimal_model(&p, SolverOptions::default()).unwrap();
        assert_eq!(m.texts(p.symbols()), vec!["p", "r"]);
        assert_eq!(m.status, Status::Satisfiable);
    }

    #[test]
    fn single_fact() {
        let p = ProgramBuilder::horn().fact("a").unwrap().clone().build().unwrap();
        let m = minimal_model(&p, SolverOptions::default()).unwrap();
        assert_eq!(m.texts(p.symbols()), vec!["a"]);
    }

    #[test]
    fn strict_integrity_discards_the_model() {
        let mut b = ProgramBuilder::horn();
        b.fact("a").unwrap().rule("false", &["a"]).unwrap();
        let p = b.build().unwrap();
        let strict = minimal_model(&p, SolverOptions::strict()).unwrap();
        assert_eq!(strict.status, Status::Unsatisfiable);
        assert!(strict.is_empty());
        assert!(strict.contains(Atom::FALSE));
        let lenient = minimal_model(&p, SolverOptions::default()).unwrap();
        assert_eq!(lenient.status, Status::Unsatisfiable);
        assert_eq!(lenient.texts(p.symbols()), vec!["a"]);
    }

    #[test]
    fn prove_queries() {
        let p = paper_program();
        assert!(prove_text(&p, "p").unwrap());
        assert!(!prove_text(&p, "s").unwrap());
        assert!(!prove_text(&p, "q").unwrap());
        assert!(prove_text(&p, "true").unwrap());
        assert!(prove_text(&p, "nope").is_err());
        assert_eq!(prove(&p, Atom(99)), Err(SolveError::UnknownGoal(Atom(99))));
    }

    #[test]
    fn goal_proof_wins_over_contradiction() {
        let mut b = ProgramBuilder::horn();
        b.fact("a").unwrap().rule("false", &["a"]).unwrap().rule("g", &["a"]).unwrap();
        let p = b.build().unwrap();
        let g = p.symbols().lookup("g").unwrap();
        let m = minimal_model(
            &p,
            SolverOptions {
                strict_integrity: true,
                stop_at_goal: Some(g),
            },
        )
        .unwrap();
        assert_eq!(m.proved_goal, Some(g));
        assert!(m.contains(g));
    }

    #[test]
    fn duplicate_body_atoms_count_once() {
        let mut b = ProgramBuilder::horn();
        b.fact("a").unwrap().rule("b", &["a", "a", "a"]).unwrap();
        let p = b.build().unwrap();
        let m = minimal_model(&p, SolverOptions::default()).unwrap();
        assert_eq!(m.texts(p.symbols()), vec!["a", "b"]);
    }

    #[test]
    fn cycles_without_support_stay_false() {
        let mut b = ProgramBuilder::horn();
        b.rule("a", &["b"]).unwrap().rule("b", &["a"]).unwrap().fact("c").unwrap();
        let p = b.build().unwrap();
        let m = minimal_model(&p, SolverOptions::default()).unwrap();
        assert_eq!(m.texts(p.symbols()), vec!["c"]);
    }

    #[test]
    fn rejects_dual_programs() {
        let p = ProgramBuilder::dual().implies("a", &["false"]).unwrap().clone().build().unwrap();
        assert_eq!(minimal_model(&p, SolverOptions::default()), Err(SolveError::NotHorn));
    }

    #[test]
    fn counters_reach_zero_only_for_fired_clauses() {
        let p = paper_program();
        let counters = ClauseCounters::new(&p).unwrap();
        assert_eq!(counters.remaining(), &[1, 1, 2, 1, 1]);
        assert_eq!(counters.watchers(p.symbols().lookup("r").unwrap()), &[1, 2]);
    }
}
