use std::fmt::Write as _;

use indexmap::IndexMap;
use thiserror::Error;

use super::grammar::{DcgGrammar, DcgRule};
use super::RepeatedAnswer;
use crate::syntax::{quote_atom, read_quoted};

/// Generation-mode driver printing every sentence of the language.
pub const GO_DRIVER: &str = "go:-q0(Xs,[]),nl,member(X,Xs),write(X),nl,nl,fail.";

const QUESTION_PREFIX: &str = "Q: ";
const ANSWER_PREFIX: &str = "A: ";

/// Prolog source for the grammar: rules, terminal productions, `opens/2`
/// facts, `repeated_answer/2` facts and the `go/0` driver.
pub fn render_dcg(g: &DcgGrammar) -> String {
    let mut out = String::new();
    out.push_str("% question/answer grammar; run go/0 to list its sentences\n");
    for r in &g.rules {
        match r.next {
            Some(next) => {
                let _ = writeln!(out, "q{h}-->q{h}_,a{a}_,q{next}.", h = r.head, a = r.answer);
            }
            None => {
                let _ = writeln!(out, "q{h}-->q{h}_,a{a}_.", h = r.head, a = r.answer);
            }
        }
    }
    for (i, q) in g.questions.iter().enumerate() {
        let _ = writeln!(out, "q{i}_-->[{}].", quote_atom(&format!("{QUESTION_PREFIX}{q}")));
    }
    for (i, a) in g.answers.iter().enumerate() {
        let _ = writeln!(out, "a{i}_-->[{}].", quote_atom(&format!("{ANSWER_PREFIX}{a}")));
    }
    for (q, n) in &g.opens {
        let _ = writeln!(out, "opens({},{n}).", quote_atom(q));
    }
    for r in &g.repeated_answers {
        let _ = writeln!(out, "repeated_answer({},{}).", quote_atom(&r.question), quote_atom(&r.answer));
    }
    out.push_str(GO_DRIVER);
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DcgReadError {
    pub line: usize,
    pub message: String,
}

struct Line<'a> {
    no: usize,
    rest: &'a str,
}

impl<'a> Line<'a> {
    fn err(&self, message: impl Into<String>) -> DcgReadError {
        DcgReadError {
            line: self.no,
            message: message.into(),
        }
    }

    fn eat(&mut self, lit: &str) -> Result<(), DcgReadError> {
        match self.rest.strip_prefix(lit) {
            Some(r) => {
                self.rest = r;
                Ok(())
            }
            None => Err(self.err(format!("expected {lit:?} at {:?}", self.rest))),
        }
    }

    fn try_eat(&mut self, lit: &str) -> bool {
        self.eat(lit).is_ok()
    }

    fn number(&mut self) -> Result<usize, DcgReadError> {
        let end = self.rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(self.rest.len());
        if end == 0 {
            return Err(self.err(format!("expected a number at {:?}", self.rest)));
        }
        let n = self.rest[..end].parse().map_err(|_| self.err("number out of range"))?;
        self.rest = &self.rest[end..];
        Ok(n)
    }

    fn quoted(&mut self) -> Result<String, DcgReadError> {
        let (text, rest) = read_quoted(self.rest).map_err(|e| self.err(e.to_string()))?;
        self.rest = rest;
        Ok(text)
    }

    fn end(&mut self) -> Result<(), DcgReadError> {
        self.eat(".")?;
        if !self.rest.trim().is_empty() {
            return Err(self.err(format!("trailing text {:?}", self.rest)));
        }
        Ok(())
    }
}

fn place(table: &mut Vec<Option<String>>, i: usize, text: String) {
    if table.len() <= i {
        table.resize(i + 1, None);
    }
    table[i] = Some(text);
}

fn complete(table: Vec<Option<String>>, what: &str) -> Result<Vec<String>, DcgReadError> {
    table
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            t.ok_or_else(|| DcgReadError {
                line: 0,
                message: format!("missing terminal {what}{i}_"),
            })
        })
        .collect()
}

/// Reads the output of [`render_dcg`] back into a grammar. Only the line
/// shapes that `render_dcg` emits are understood.
pub fn read_dcg(text: &str) -> Result<DcgGrammar, DcgReadError> {
    let mut rules = Vec::new();
    let mut questions: Vec<Option<String>> = Vec::new();
    let mut answers: Vec<Option<String>> = Vec::new();
    let mut opens = IndexMap::new();
    let mut repeated_answers = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') || trimmed == GO_DRIVER {
            continue;
        }
        let mut l = Line { no: i + 1, rest: trimmed };
        if l.try_eat("opens(") {
            let q = l.quoted()?;
            l.eat(",")?;
            let n = l.number()?;
            l.eat(")")?;
            l.end()?;
            opens.insert(q, n);
        } else if l.try_eat("repeated_answer(") {
            let question = l.quoted()?;
            l.eat(",")?;
            let answer = l.quoted()?;
            l.eat(")")?;
            l.end()?;
            repeated_answers.push(RepeatedAnswer { question, answer });
        } else if l.try_eat("a") {
            let idx = l.number()?;
            l.eat("_-->[")?;
            let t = l.quoted()?;
            l.eat("]")?;
            l.end()?;
            let t = t
                .strip_prefix(ANSWER_PREFIX)
                .ok_or_else(|| l.err("answer terminal lacks the 'A: ' prefix"))?;
            place(&mut answers, idx, t.to_string());
        } else if l.try_eat("q") {
            let head = l.number()?;
            if l.try_eat("_-->[") {
                let t = l.quoted()?;
                l.eat("]")?;
                l.end()?;
                let t = t
                    .strip_prefix(QUESTION_PREFIX)
                    .ok_or_else(|| l.err("question terminal lacks the 'Q: ' prefix"))?;
                place(&mut questions, head, t.to_string());
                continue;
            }
            l.eat("-->q")?;
            let again = l.number()?;
            if again != head {
                return Err(l.err(format!("rule for q{head} starts with q{again}_")));
            }
            l.eat("_,a")?;
            let answer = l.number()?;
            l.eat("_")?;
            let next = if l.try_eat(",q") { Some(l.number()?) } else { None };
            l.end()?;
            rules.push(DcgRule { head, answer, next });
        } else {
            return Err(l.err(format!("unrecognised line {trimmed:?}")));
        }
    }

    let g = DcgGrammar {
        rules,
        questions: complete(questions, "q")?,
        answers: complete(answers, "a")?,
        opens,
        repeated_answers,
    };
    for r in &g.rules {
        let dangling = r.head >= g.questions.len()
            || r.answer >= g.answers.len()
            || r.next.is_some_and(|n| n >= g.questions.len());
        if dangling {
            return Err(DcgReadError {
                line: 0,
                message: format!("rule {r:?} refers to a missing terminal"),
            });
        }
    }
    Ok(g)
}
