//! Executable propositional logic programs elicited from language models.

pub mod cli;
pub mod dcg;
pub mod dual;
pub mod engine;
pub mod explore;
pub mod fixpoint;
pub mod json;
pub mod matrix;
pub mod oracle;
pub mod program;
pub mod relgraph;
pub mod soft;
pub mod symbols;
pub mod syntax;

pub use program::{Clauses, DualHornClause, HornClause, Model, Program, ProgramBuilder, ProgramKind, Status};
pub use symbols::{Atom, SymbolTable};
