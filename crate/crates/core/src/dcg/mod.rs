//! Question/answer trees grown from follow-up questions, compiled to a
//! Definite Clause Grammar whose language is the set of root-to-leaf
//! question/answer paths.
//!
//! Follow-up questions that repeat a question on the current path are
//! dropped, so the grammar is loop-free and its language finite. A child
//! whose answer repeats an answer on its path is not added to the tree; the
//! answer is collected in `repeated_answers` instead. Questions reached at
//! the depth limit stay open and are counted in `opens`.

mod grammar;
mod render;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle::{collapse_whitespace, Oracle, OracleError, OracleRequest, Purpose};

pub use grammar::{generate_language, tree_to_dcg, DcgGrammar, DcgRule};
pub use render::{read_dcg, render_dcg, DcgReadError, GO_DRIVER};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaNode {
    pub id: usize,
    pub question: String,
    /// `None` on open nodes left at the depth limit.
    pub answer: Option<String>,
    pub children: Vec<QaNode>,
}

impl QaNode {
    fn open(id: usize, question: String) -> Self {
        QaNode {
            id,
            question,
            answer: None,
            children: Vec::new(),
        }
    }

    pub fn is_open(&self) -> bool {
        self.answer.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepeatedAnswer {
    pub question: String,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaTree {
    pub root: QaNode,
    /// Open question text and the number of times it was generated.
    pub opens: IndexMap<String, usize>,
    pub repeated_answers: Vec<RepeatedAnswer>,
    /// Follow-up questions dropped because they repeat a question on
    /// their path; they do not count as open.
    pub dropped_loops: Vec<String>,
}

#[derive(Debug, Error)]
pub enum DcgError {
    #[error("oracle failed: {source}")]
    Oracle { source: OracleError, partial: Box<QaTree> },
    #[error("initiator question is empty")]
    EmptyQuestion,
}

enum Grown {
    Kept,
    RepeatedAnswer(String),
}

struct Builder<'a, O: ?Sized> {
    oracle: &'a O,
    limit: usize,
    next_id: usize,
    opens: IndexMap<String, usize>,
    repeated_answers: Vec<RepeatedAnswer>,
    dropped_loops: Vec<String>,
}

impl<O: Oracle + ?Sized> Builder<'_, O> {
    fn fresh(&mut self, question: String) -> QaNode {
        let node = QaNode::open(self.next_id, question);
        self.next_id += 1;
        node
    }

    fn grow(
        &mut self,
        node: &mut QaNode,
        depth: usize,
        questions: &mut Vec<String>,
        answers: &mut Vec<String>,
    ) -> Result<Grown, OracleError> {
        if depth >= self.limit {
            *self.opens.entry(node.question.clone()).or_insert(0) += 1;
            return Ok(Grown::Kept);
        }
        let req = OracleRequest::new(Purpose::Answer, node.question.clone()).with_trace(questions.clone());
        let reply = self.oracle.ask(&req)?;
        let answer = collapse_whitespace(&reply.items.join(" "));
        if answers.contains(&answer) {
            return Ok(Grown::RepeatedAnswer(answer));
        }
        node.answer = Some(answer.clone());

        let req = OracleRequest::new(Purpose::Followups, node.question.clone())
            .with_trace(questions.clone())
            .with_param("answer", answer.clone());
        let followups = match self.oracle.ask(&req) {
            Ok(r) => r.items,
            Err(OracleError::Unparseable { .. }) => Vec::new(),
            Err(e) => return Err(e),
        };

        questions.push(node.question.clone());
        answers.push(answer);
        let mut seen = Vec::new();
        let mut result = Ok(Grown::Kept);
        for q in followups {
            let q = collapse_whitespace(&q);
            if q.is_empty() || seen.contains(&q) {
                continue;
            }
            seen.push(q.clone());
            if questions.contains(&q) {
                self.dropped_loops.push(q);
                continue;
            }
            let mut child = self.fresh(q);
            match self.grow(&mut child, depth + 1, questions, answers) {
                Ok(Grown::Kept) => node.children.push(child),
                Ok(Grown::RepeatedAnswer(answer)) => self.repeated_answers.push(RepeatedAnswer {
                    question: child.question,
                    answer,
                }),
                Err(e) => {
                    node.children.push(child);
                    result = Err(e);
                    break;
                }
            }
        }
        questions.pop();
        answers.pop();
        result
    }
}

/// Grows the question/answer tree of `initiator` down to `depth` levels of
/// answered questions.
pub fn build_qatree<O: Oracle + ?Sized>(initiator: &str, depth: usize, oracle: &O) -> Result<QaTree, DcgError> {
    let initiator = collapse_whitespace(initiator);
    if initiator.is_empty() {
        return Err(DcgError::EmptyQuestion);
    }
    let mut builder = Builder {
        oracle,
        limit: depth,
        next_id: 0,
        opens: IndexMap::new(),
        repeated_answers: Vec::new(),
        dropped_loops: Vec::new(),
    };
    let mut root = builder.fresh(initiator);
    let grown = builder.grow(&mut root, 0, &mut Vec::new(), &mut Vec::new());
    let tree = QaTree {
        root,
        opens: builder.opens,
        repeated_answers: builder.repeated_answers,
        dropped_loops: builder.dropped_loops,
    };
    match grown {
        Ok(_) => Ok(tree),
        Err(source) => Err(DcgError::Oracle {
            source,
            partial: Box::new(tree),
        }),
    }
}
