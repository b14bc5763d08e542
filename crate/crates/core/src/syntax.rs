//! Prolog-like text syntax for Horn and Dual-Horn programs.
//!
//! ```text
//! 'p' :- 'q', r.          % Horn rule
//! r.                      % Horn fact, stored as r :- true
//! 'a' => 'b' ; 'c'.       % Dual-Horn clause
//! 'b' => false.           % negative fact
//! ```
//!
//! Atoms are single-quoted strings (with `\'`, `''`, `\\`, `\n`, `\t`
//! escapes) or bare identifiers starting with a lowercase letter. Raw
//! newlines are not allowed inside quotes.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::program::{Clauses, DualHornClause, HornClause, Program, ProgramBuilder, ProgramError, ProgramKind};
use crate::symbols::{Atom, SymbolError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unterminated quoted atom")]
    UnterminatedQuote,
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    UnexpectedToken { expected: &'static str, found: String },
    #[error("missing final '.'")]
    MissingDot,
    #[error("clause mixes ':-' and '=>'")]
    BothConnectives,
    #[error("{found} clause in a {expected} program")]
    MixedConnectives { expected: ProgramKind, found: ProgramKind },
    #[error("empty program")]
    EmptyProgram,
    #[error("empty atom")]
    EmptyAtom,
    #[error(transparent)]
    Program(ProgramError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(pos: Pos, kind: ParseErrorKind) -> Self {
        ParseError { pos, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    Neck,
    Arrow,
    Comma,
    Semi,
    Dot,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Atom(a) => write!(f, "atom {a:?}"),
            Tok::Neck => f.write_str("':-'"),
            Tok::Arrow => f.write_str("'=>'"),
            Tok::Comma => f.write_str("','"),
            Tok::Semi => f.write_str("';'"),
            Tok::Dot => f.write_str("'.'"),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    /// Next token and its start position, or `None` at end of input.
    fn next_token(&mut self) -> Result<Option<(Pos, Tok)>, ParseError> {
        self.skip_trivia();
        let start = self.pos();
        let Some(c) = self.bump() else {
            return Ok(None);
        };
        let tok = match c {
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '.' => Tok::Dot,
            ':' if self.chars.peek() == Some(&'-') => {
                self.bump();
                Tok::Neck
            }
            '=' if self.chars.peek() == Some(&'>') => {
                self.bump();
                Tok::Arrow
            }
            '\'' => Tok::Atom(self.quoted(start)?),
            c if c.is_lowercase() => {
                let mut s = String::from(c);
                while let Some(&c) = self.chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        s.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Atom(s)
            }
            other => return Err(ParseError::new(start, ParseErrorKind::UnexpectedChar(other))),
        };
        Ok(Some((start, tok)))
    }

    fn quoted(&mut self, start: Pos) -> Result<String, ParseError> {
        let unterminated = || ParseError::new(start, ParseErrorKind::UnterminatedQuote);
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(unterminated()),
                Some('\'') => {
                    if self.chars.peek() == Some(&'\'') {
                        self.bump();
                        s.push('\'');
                    } else {
                        return Ok(s);
                    }
                }
                Some('\\') => match self.bump() {
                    None | Some('\n') => return Err(unterminated()),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('r') => s.push('\r'),
                    Some(c @ ('\\' | '\'')) => s.push(c),
                    Some(c) => {
                        s.push('\\');
                        s.push(c);
                    }
                },
                Some(c) => s.push(c),
            }
        }
    }
}

/// Parses a program in the text syntax. The kind is taken from `kind_hint`
/// when given, otherwise from the first clause (`=>` means dual; `:-` or a
/// bare fact means Horn).
pub fn parse_program(text: &str, kind_hint: Option<ProgramKind>) -> Result<Program, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut builder: Option<ProgramBuilder> = kind_hint.map(ProgramBuilder::new);

    while let Some((clause_pos, tok)) = lexer.next_token()? {
        let head = match tok {
            Tok::Atom(a) => a,
            other => {
                return Err(ParseError::new(
                    clause_pos,
                    ParseErrorKind::UnexpectedToken {
                        expected: "an atom",
                        found: other.to_string(),
                    },
                ))
            }
        };
        let (conn_pos, conn) = expect_some(&mut lexer)?;
        let (kind, items) = match conn {
            Tok::Dot => (ProgramKind::Horn, vec![(conn_pos, "true".to_string())]),
            Tok::Neck => (ProgramKind::Horn, atom_list(&mut lexer, Tok::Comma, Tok::Arrow)?),
            Tok::Arrow => (ProgramKind::Dual, atom_list(&mut lexer, Tok::Semi, Tok::Neck)?),
            other => {
                return Err(ParseError::new(
                    conn_pos,
                    ParseErrorKind::UnexpectedToken {
                        expected: "':-', '=>' or '.'",
                        found: other.to_string(),
                    },
                ))
            }
        };

        let b = builder.get_or_insert_with(|| ProgramBuilder::new(kind));
        if b.kind() != kind {
            return Err(ParseError::new(
                clause_pos,
                ParseErrorKind::MixedConnectives {
                    expected: b.kind(),
                    found: kind,
                },
            ));
        }
        let head_atom = intern_at(b, &head, clause_pos)?;
        let mut atoms = Vec::with_capacity(items.len());
        for (pos, text) in &items {
            atoms.push(intern_at(b, text, *pos)?);
        }
        let pushed = match kind {
            ProgramKind::Horn => b.push_horn(HornClause {
                head: head_atom,
                body: atoms,
            }),
            ProgramKind::Dual => b.push_dual(DualHornClause {
                premise: head_atom,
                consequents: atoms,
            }),
        };
        pushed.map_err(|e| ParseError::new(clause_pos, ParseErrorKind::Program(e)))?;
    }

    match builder {
        Some(b) if !b.is_empty() => Ok(b.build_allow_empty()),
        _ => Err(ParseError::new(lexer.pos(), ParseErrorKind::EmptyProgram)),
    }
}

fn intern_at(b: &mut ProgramBuilder, text: &str, pos: Pos) -> Result<Atom, ParseError> {
    b.intern(text).map_err(|e| match e {
        SymbolError::Empty => ParseError::new(pos, ParseErrorKind::EmptyAtom),
    })
}

fn expect_some(lexer: &mut Lexer<'_>) -> Result<(Pos, Tok), ParseError> {
    match lexer.next_token()? {
        Some(t) => Ok(t),
        None => Err(ParseError::new(lexer.pos(), ParseErrorKind::MissingDot)),
    }
}

/// Reads `atom (sep atom)* '.'`; `other_conn` is the connective of the
/// other clause kind, reported as a mixed-clause error.
fn atom_list(lexer: &mut Lexer<'_>, sep: Tok, other_conn: Tok) -> Result<Vec<(Pos, String)>, ParseError> {
    let mut items = Vec::new();
    loop {
        let (pos, tok) = expect_some(lexer)?;
        match tok {
            Tok::Atom(a) => items.push((pos, a)),
            other => {
                return Err(ParseError::new(
                    pos,
                    ParseErrorKind::UnexpectedToken {
                        expected: "an atom",
                        found: other.to_string(),
                    },
                ))
            }
        }
        let (pos, tok) = expect_some(lexer)?;
        if tok == Tok::Dot {
            return Ok(items);
        }
        if tok == sep {
            continue;
        }
        if tok == other_conn {
            return Err(ParseError::new(pos, ParseErrorKind::BothConnectives));
        }
        return Err(ParseError::new(
            pos,
            ParseErrorKind::UnexpectedToken {
                expected: if sep == Tok::Comma { "',' or '.'" } else { "';' or '.'" },
                found: tok.to_string(),
            },
        ));
    }
}

/// Single-quoted form of an atom text, escaping quotes, backslashes and
/// control whitespace.
pub fn quote_atom(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('\'');
    for c in text.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

/// Reads a single-quoted atom at the start of `input`, returning its text
/// and the remaining input.
pub fn read_quoted(input: &str) -> Result<(String, &str), ParseError> {
    let mut lexer = Lexer::new(input);
    let start = lexer.pos();
    if lexer.bump() != Some('\'') {
        return Err(ParseError::new(
            start,
            ParseErrorKind::UnexpectedToken {
                expected: "a quoted atom",
                found: input.chars().next().map(|c| format!("{c:?}")).unwrap_or_else(|| "end of input".into()),
            },
        ));
    }
    let text = lexer.quoted(start)?;
    let consumed = input.len() - lexer.chars.clone().map(char::len_utf8).sum::<usize>();
    Ok((text, &input[consumed..]))
}

/// Canonical text form: one clause per line, every atom quoted, facts
/// written `'h' :- 'true'.`.
pub fn serialize_program(p: &Program) -> String {
    let mut out = String::new();
    let q = |a: Atom| quote_atom(p.text(a));
    let join = |atoms: &[Atom], sep: &str| atoms.iter().map(|&a| q(a)).collect::<Vec<_>>().join(sep);
    match p.clauses() {
        Clauses::Horn(cs) => {
            for c in cs {
                let _ = writeln!(out, "{} :- {}.", q(c.head), join(&c.body, ", "));
            }
        }
        Clauses::Dual(cs) => {
            for c in cs {
                let _ = writeln!(out, "{} => {}.", q(c.premise), join(&c.consequents, "; "));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(p: &Program) -> Vec<(String, Vec<String>)> {
        p.clause_texts()
    }

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn horn_rules_and_facts() {
        let p = parse_program("'p' :- 'q', 'r'.\n'r'.", None).unwrap();
        assert_eq!(p.kind(), ProgramKind::Horn);
        assert_eq!(
            texts(&p),
            vec![("p".into(), s(&["q", "r"])), ("r".into(), s(&["true"]))]
        );
    }

    #[test]
    fn dual_clause_with_four_consequents() {
        let src = "'Reduced reaction time' => 'Increased accident risk'; 'Delayed braking response'; \
                   'Higher collision likelihood'; 'Compromised driving safety'.";
        let p = parse_program(src, None).unwrap();
        assert_eq!(p.kind(), ProgramKind::Dual);
        let cs = p.dual_clauses().unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].consequents.len(), 4);
        assert_eq!(p.text(cs[0].premise), "Reduced reaction time");
    }

    #[test]
    fn mixed_connectives_are_rejected() {
        let err = parse_program("p :- q. r => s.", None).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::MixedConnectives { .. }));
        assert_eq!(err.pos, Pos { line: 1, col: 9 });
        // a bare fact makes the program Horn
        let err = parse_program("a => b.\nc.", None).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::MixedConnectives { .. }));
        assert_eq!(err.pos.line, 2);
    }

    #[test]
    fn kind_hint_overrides_inference() {
        let err = parse_program("p :- q.", Some(ProgramKind::Dual)).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::MixedConnectives { .. }));
        let p = parse_program("a => false.", Some(ProgramKind::Dual)).unwrap();
        assert_eq!(p.kind(), ProgramKind::Dual);
    }

    #[test]
    fn both_connectives_in_one_clause() {
        let err = parse_program("a :- b => c.", None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::BothConnectives);
        let err = parse_program("a => b :- c.", None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::BothConnectives);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_program("p :- 'q", None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnterminatedQuote);
        assert_eq!(err.pos, Pos { line: 1, col: 6 });

        let err = parse_program("p :- 'q\nr'.", None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnterminatedQuote);

        let err = parse_program("p :- q", None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingDot);

        let err = parse_program("% only a comment\n", None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::EmptyProgram);
        assert_eq!(parse_program("", None).unwrap_err().kind, ParseErrorKind::EmptyProgram);

        let err = parse_program("p :- q; r.", None).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnexpectedToken { .. }));
        assert_eq!(err.pos, Pos { line: 1, col: 7 });

        let err = parse_program("P :- q.", None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('P'));

        let err = parse_program("'' :- q.", None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::EmptyAtom);
    }

    #[test]
    fn reserved_atoms_in_wrong_position() {
        let err = parse_program("true :- p.", None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Program(ProgramError::TrueHead));
        let err = parse_program("false => p.", None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Program(ProgramError::FalsePremise));
        // integrity constraints are fine
        assert!(parse_program("false :- p. p.", None).is_ok());
    }

    #[test]
    fn comments_and_escapes() {
        let src = "% header\n'it\\'s' :- 'a''b', 'back\\\\slash'. % trailing\n";
        let p = parse_program(src, None).unwrap();
        assert_eq!(texts(&p), vec![("it's".into(), s(&["a'b", "back\\slash"]))]);
    }

    #[test]
    fn duplicate_clauses_are_kept() {
        let p = parse_program("a. a. b :- a, a.", None).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.horn_clauses().unwrap()[2].body.len(), 2);
    }

    #[test]
    fn canonical_forms() {
        let p = parse_program("r.", None).unwrap();
        assert_eq!(serialize_program(&p), "'r' :- 'true'.\n");
        let d = parse_program("a => false.", None).unwrap();
        assert_eq!(serialize_program(&d), "'a' => 'false'.\n");
        let q = ProgramBuilder::horn()
            .rule("it's \\ odd\n", &["x"])
            .unwrap()
            .clone()
            .build()
            .unwrap();
        let text = serialize_program(&q);
        assert_eq!(text, "'it\\'s \\\\ odd' :- 'x'.\n");
        assert_eq!(texts(&parse_program(&text, None).unwrap()), texts(&q));
    }

    #[test]
    fn quoted_prefix_reader() {
        let (text, rest) = read_quoted("'it\\'s here',1).").unwrap();
        assert_eq!(text, "it's here");
        assert_eq!(rest, ",1).");
        assert!(read_quoted("x").is_err());
        assert_eq!(read_quoted("'open").unwrap_err().kind, ParseErrorKind::UnterminatedQuote);
    }

    #[test]
    fn parsed_atom_ids_are_contiguous() {
        let p = parse_program("'x y' :- z, 'x y'. w.", None).unwrap();
        let ids: Vec<u32> = p.symbols().atoms().map(|a| a.0).collect();
        assert_eq!(ids, (0..p.symbols().len() as u32).collect::<Vec<_>>());
        assert_eq!(p.symbols().len(), 5);
    }
}
