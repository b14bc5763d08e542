//! Interning of propositional symbols.
//!
//! Every atom is a natural-language string mapped to a dense index. The two
//! reserved atoms `true` and `false` always occupy indices 0 and 1.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Text of the reserved atom that always holds.
pub const TRUE_TEXT: &str = "true";
/// Text of the reserved atom whose derivation signals a contradiction.
pub const FALSE_TEXT: &str = "false";

/// A propositional symbol, identified by its dense intern index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(pub u32);

impl Atom {
    pub const TRUE: Atom = Atom(0);
    pub const FALSE: Atom = Atom(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_reserved(self) -> bool {
        self.0 < 2
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("atom text is empty")]
    Empty,
}

/// Bijective map between atom texts and dense ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    texts: Vec<String>,
    ids: HashMap<String, Atom>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut table = SymbolTable {
            texts: Vec::new(),
            ids: HashMap::new(),
        };
        for reserved in [TRUE_TEXT, FALSE_TEXT] {
            let atom = Atom(table.texts.len() as u32);
            table.texts.push(reserved.to_string());
            table.ids.insert(reserved.to_string(), atom);
        }
        table
    }

    /// Interns `text` after trimming surrounding whitespace. Fresh texts get
    /// the next dense id in first-seen order.
    pub fn intern(&mut self, text: &str) -> Result<Atom, SymbolError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(SymbolError::Empty);
        }
        if let Some(&atom) = self.ids.get(text) {
            return Ok(atom);
        }
        let atom = Atom(self.texts.len() as u32);
        self.texts.push(text.to_string());
        self.ids.insert(text.to_string(), atom);
        Ok(atom)
    }

    pub fn lookup(&self, text: &str) -> Option<Atom> {
        self.ids.get(text.trim()).copied()
    }

    /// Text of an atom. Panics if the atom was not issued by this table.
    pub fn text(&self, atom: Atom) -> &str {
        &self.texts[atom.index()]
    }

    pub fn get(&self, atom: Atom) -> Option<&str> {
        self.texts.get(atom.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        // the reserved atoms are always present
        false
    }

    pub fn contains(&self, atom: Atom) -> bool {
        atom.index() < self.texts.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        (0..self.texts.len() as u32).map(Atom)
    }
}
