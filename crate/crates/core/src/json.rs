//! JSON exchange format for Horn programs: a list of `[head, [body...]]`
//! entries, facts written as `[h, ["true"]]`.

use serde_json::Value;
use thiserror::Error;

use crate::program::{Clauses, Program, ProgramBuilder, ProgramError};

#[derive(Debug, Error)]
pub enum JsonProgramError {
    #[error("malformed JSON: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("expected a list of clauses at the top level")]
    NotAList,
    #[error("clause {index}: expected a [head, [body...]] pair")]
    BadEntry { index: usize },
    #[error("clause {index}: atoms must be strings")]
    NonStringAtom { index: usize },
    #[error("clause {index}: {source}")]
    Clause { index: usize, source: ProgramError },
    #[error("empty program")]
    Empty,
    #[error("only Horn programs have a JSON form")]
    NotHorn,
}

pub fn load_json_program(text: &str) -> Result<Program, JsonProgramError> {
    let value: Value = serde_json::from_str(text)?;
    let entries = value.as_array().ok_or(JsonProgramError::NotAList)?;
    if entries.is_empty() {
        return Err(JsonProgramError::Empty);
    }
    let mut builder = ProgramBuilder::horn();
    for (index, entry) in entries.iter().enumerate() {
        let pair = entry
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or(JsonProgramError::BadEntry { index })?;
        let head = pair[0].as_str().ok_or(JsonProgramError::NonStringAtom { index })?;
        let body = pair[1].as_array().ok_or(JsonProgramError::BadEntry { index })?;
        let body = body
            .iter()
            .map(|b| b.as_str().ok_or(JsonProgramError::NonStringAtom { index }))
            .collect::<Result<Vec<_>, _>>()?;
        builder
            .rule(head, &body)
            .map_err(|source| JsonProgramError::Clause { index, source })?;
    }
    Ok(builder.build_allow_empty())
}

/// Inverse of [`load_json_program`], one clause per line.
pub fn to_json_program(p: &Program) -> Result<String, JsonProgramError> {
    let Clauses::Horn(cs) = p.clauses() else {
        return Err(JsonProgramError::NotHorn);
    };
    let lines: Vec<String> = cs
        .iter()
        .map(|c| {
            let body: Vec<&str> = c.body.iter().map(|&b| p.text(b)).collect();
            serde_json::to_string(&(p.text(c.head), body)).expect("strings always serialize")
        })
        .collect();
    Ok(format!("[\n  {}\n]\n", lines.join(",\n  ")))
}
