//! Engine selection and model files.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::dual::{self, DualError};
use crate::fixpoint::{self, SolveError, SolverOptions};
use crate::matrix::{self, MatrixError};
use crate::program::{Model, Program, ProgramKind, Status};
use crate::symbols::Atom;
use crate::syntax::quote_atom;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Engine {
    #[default]
    Fixpoint,
    Matrix,
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixpoint" => Ok(Engine::Fixpoint),
            "matrix" => Ok(Engine::Matrix),
            other => Err(format!("unknown engine {other:?} (expected fixpoint or matrix)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Dual(#[from] DualError),
}

/// Minimal model of a Horn program with either engine.
///
/// The matrix engine always computes the full least model; options are
/// applied to its result so both engines honor the same contract.
pub fn solve(program: &Program, engine: Engine, opts: SolverOptions) -> Result<Model, EngineError> {
    match engine {
        Engine::Fixpoint => Ok(fixpoint::minimal_model(program, opts)?),
        Engine::Matrix => {
            let full = matrix::minimal_model(program)?;
            if let Some(goal) = opts.stop_at_goal {
                if !program.symbols().contains(goal) {
                    return Err(SolveError::UnknownGoal(goal).into());
                }
                if full.contains(goal) {
                    return Ok(Model::new(full.true_atoms().to_vec(), full.status, Some(goal)));
                }
            }
            if opts.strict_integrity && full.status == Status::Unsatisfiable {
                return Ok(Model::new(Vec::new(), Status::Unsatisfiable, None));
            }
            Ok(full)
        }
    }
}

/// Falsified atoms of a dual program, computed on its contrapositive.
pub fn falsified_atoms(program: &Program, engine: Engine) -> Result<Vec<Atom>, EngineError> {
    let (compiled, map) = dual::contrapose(program)?;
    let model = solve(&compiled, engine, SolverOptions::default())?;
    let mut atoms: Vec<Atom> = model
        .true_atoms()
        .iter()
        .filter_map(|&t| map.source_of(t))
        .collect();
    atoms.sort_unstable();
    Ok(atoms)
}

/// Model file for `program`: Prolog facts for a Horn program, negative
/// facts over the falsified atoms for a dual program.
pub fn model_file(program: &Program, engine: Engine, source_name: &str) -> Result<String, EngineError> {
    let mut out = String::new();
    match program.kind() {
        ProgramKind::Horn => {
            let model = solve(program, engine, SolverOptions::default())?;
            let status = match model.status {
                Status::Satisfiable => "satisfiable",
                Status::Unsatisfiable => "unsatisfiable",
            };
            let _ = writeln!(out, "% minimal model of {source_name}");
            let _ = writeln!(out, "% status: {status}");
            for &a in model.true_atoms() {
                let _ = writeln!(out, "{}.", quote_atom(program.text(a)));
            }
        }
        ProgramKind::Dual => {
            let atoms = falsified_atoms(program, engine)?;
            let _ = writeln!(out, "% falsified atoms of {source_name}");
            for a in atoms {
                let _ = writeln!(out, "{} => false.", quote_atom(program.text(a)));
            }
        }
    }
    Ok(out)
}
