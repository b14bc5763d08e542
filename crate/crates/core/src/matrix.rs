//! Minimal models by iterated thresholded sparse matrix-vector products.
//!
//! Every atom is a column of a 0/1 truth vector. A clause `h :- b1..bk`
//! becomes a row with weight `1/k` on each body column, so the row's dot
//! product with the truth vector reaches 1 exactly when the whole body holds.
//! An atom with `m > 1` defining clauses gets `m` auxiliary columns, one
//! conjunctive row per clause targeting its auxiliary column, and one
//! disjunctive row with weight 1 per auxiliary column targeting the atom.
//!
//! One step maps `v` to `v | (M v >= 1 - eps)`; iterating from the vector
//! holding only `true` climbs an ascending chain to the least model.

use rayon::prelude::*;
use thiserror::Error;

use crate::program::{Model, Program, Status};
use crate::symbols::Atom;

/// Slack on the `>= 1` test absorbing rounding in sums of `1/k`.
pub const THRESHOLD_EPSILON: f64 = 1e-9;

/// Row count above which a step evaluates rows on the rayon pool.
const PARALLEL_ROWS: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("the matrix engine needs a Horn program")]
    NotHorn,
    #[error("vector has {found} entries, matrix has {expected} columns")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the 'true' column of the input vector must be set")]
    TrueUnset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Conjunctive,
    Disjunctive,
}

/// Compressed-row storage.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsrMatrix {
    row_offsets: Vec<usize>,
    cols: Vec<u32>,
    weights: Vec<f64>,
}

impl CsrMatrix {
    fn new() -> Self {
        CsrMatrix {
            row_offsets: vec![0],
            cols: Vec::new(),
            weights: Vec::new(),
        }
    }

    fn push_row(&mut self, entries: impl IntoIterator<Item = (u32, f64)>) {
        for (c, w) in entries {
            self.cols.push(c);
            self.weights.push(w);
        }
        self.row_offsets.push(self.cols.len());
    }

    pub fn rows(&self) -> usize {
        self.row_offsets.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Column indices and weights of row `r`.
    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let span = self.row_offsets[r]..self.row_offsets[r + 1];
        (&self.cols[span.clone()], &self.weights[span])
    }

    #[inline]
    fn dot(&self, r: usize, v: &[bool]) -> f64 {
        let (cols, weights) = self.row(r);
        cols.iter()
            .zip(weights)
            .filter(|(c, _)| v[**c as usize])
            .map(|(_, w)| *w)
            .sum()
    }
}

/// A Horn program encoded for matrix evaluation.
///
/// Columns `0..atom_count` are the program's atoms (column = atom id);
/// higher columns are auxiliary.
#[derive(Debug, Clone)]
pub struct MatrixProgram {
    dim: usize,
    atom_count: usize,
    rows: CsrMatrix,
    row_target: Vec<u32>,
    row_kind: Vec<RowKind>,
    aux_owner: Vec<Atom>,
}

impl MatrixProgram {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn rows(&self) -> &CsrMatrix {
        &self.rows
    }

    pub fn row_target(&self, r: usize) -> usize {
        self.row_target[r] as usize
    }

    pub fn row_kind(&self, r: usize) -> RowKind {
        self.row_kind[r]
    }

    pub fn col_of(&self, atom: Atom) -> Option<usize> {
        (atom.index() < self.atom_count).then_some(atom.index())
    }

    /// Atom whose alternative definitions own auxiliary column `col`.
    pub fn aux_owner(&self, col: usize) -> Option<Atom> {
        col.checked_sub(self.atom_count)
            .and_then(|i| self.aux_owner.get(i).copied())
    }

    pub fn aux_columns(&self) -> usize {
        self.aux_owner.len()
    }

    /// Initial vector, set exactly at `true`.
    pub fn v0(&self) -> Vec<bool> {
        let mut v = vec![false; self.dim];
        v[Atom::TRUE.index()] = true;
        v
    }
}

pub fn encode(program: &Program) -> Result<MatrixProgram, MatrixError> {
    let clauses = program.horn_clauses().ok_or(MatrixError::NotHorn)?;
    let atom_count = program.symbols().len();

    let mut defs = vec![0u32; atom_count];
    for c in clauses {
        defs[c.head.index()] += 1;
    }

    let mut rows = CsrMatrix::new();
    let mut row_target = Vec::with_capacity(clauses.len());
    let mut row_kind = Vec::with_capacity(clauses.len());
    let mut aux_owner = Vec::new();
    // auxiliary columns of each multiply-defined head, in clause order
    let mut alternatives: Vec<Vec<u32>> = vec![Vec::new(); atom_count];
    let mut or_heads = Vec::new();
    let mut body: Vec<u32> = Vec::new();

    for c in clauses {
        body.clear();
        body.extend(c.body.iter().map(|a| a.0));
        body.sort_unstable();
        body.dedup();
        let weight = 1.0 / body.len() as f64;
        rows.push_row(body.iter().map(|&col| (col, weight)));
        row_kind.push(RowKind::Conjunctive);

        let head = c.head.index();
        if defs[head] > 1 {
            let aux = (atom_count + aux_owner.len()) as u32;
            aux_owner.push(c.head);
            if alternatives[head].is_empty() {
                or_heads.push(c.head);
            }
            alternatives[head].push(aux);
            row_target.push(aux);
        } else {
            row_target.push(c.head.0);
        }
    }

    for head in or_heads {
        rows.push_row(alternatives[head.index()].iter().map(|&aux| (aux, 1.0)));
        row_kind.push(RowKind::Disjunctive);
        row_target.push(head.0);
    }

    Ok(MatrixProgram {
        dim: atom_count + aux_owner.len(),
        atom_count,
        rows,
        row_target,
        row_kind,
        aux_owner,
    })
}

/// One application of the immediate-consequence operator, joined with `v`.
pub fn tp_step(m: &MatrixProgram, v: &[bool]) -> Result<Vec<bool>, MatrixError> {
    if v.len() != m.dim {
        return Err(MatrixError::DimensionMismatch {
            expected: m.dim,
            found: v.len(),
        });
    }
    if !v[Atom::TRUE.index()] {
        return Err(MatrixError::TrueUnset);
    }
    let mut w = v.to_vec();
    let fires = |r: usize| -> Option<u32> {
        let target = m.row_target[r];
        (!v[target as usize] && m.rows.dot(r, v) >= 1.0 - THRESHOLD_EPSILON).then_some(target)
    };
    let n_rows = m.rows.rows();
    if n_rows >= PARALLEL_ROWS {
        let fired: Vec<u32> = (0..n_rows).into_par_iter().filter_map(fires).collect();
        for t in fired {
            w[t as usize] = true;
        }
    } else {
        for r in 0..n_rows {
            if let Some(t) = fires(r) {
                w[t as usize] = true;
            }
        }
    }
    Ok(w)
}

/// Iterates [`tp_step`] from `v0` to the fixpoint, returning the vector and
/// the number of steps that changed it.
pub fn tp_fix_counted(m: &MatrixProgram) -> (Vec<bool>, usize) {
    let mut v = m.v0();
    // each productive step sets at least one of the dim columns
    for steps in 0..=m.dim {
        let w = tp_step(m, &v).expect("v0 and its successors are well formed");
        if w == v {
            return (v, steps);
        }
        v = w;
    }
    unreachable!("ascending chain over {} columns did not converge", m.dim)
}

pub fn tp_fix(m: &MatrixProgram) -> Vec<bool> {
    tp_fix_counted(m).0
}

pub fn decode(m: &MatrixProgram, v: &[bool]) -> Model {
    let atoms = (2..m.atom_count.min(v.len()))
        .filter(|&c| v[c])
        .map(|c| Atom(c as u32))
        .collect();
    let status = if v.get(Atom::FALSE.index()).copied().unwrap_or(false) {
        Status::Unsatisfiable
    } else {
        Status::Satisfiable
    };
    Model::new(atoms, status, None)
}

/// `decode(tp_fix(encode(p)))`.
pub fn minimal_model(program: &Program) -> Result<Model, MatrixError> {
    let m = encode(program)?;
    let v = tp_fix(&m);
    Ok(decode(&m, &v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::json::load_json_program;
    use crate::program::ProgramBuilder;

    fn paper_program() -> Program {
        load_json_program(r#"[["p",["q"]],["p",["r"]],["q",["r","s"]],["r",["true"]],["false",["q"]]]"#).unwrap()
    }

    fn col(p: &Program, t: &str) -> u32 {
        p.symbols().lookup(t).unwrap().0
    }

    #[test]
    fn fact_row() {
        let p = ProgramBuilder::horn().fact("r").unwrap().clone().build().unwrap();
        let m = encode(&p).unwrap();
        assert_eq!(m.rows().rows(), 1);
        assert_eq!(m.rows().row(0), (&[0u32][..], &[1.0][..]));
        assert_eq!(m.row_target(0), col(&p, "r") as usize);
    }

    #[test]
    fn two_atom_body_row() {
        let p = ProgramBuilder::horn().rule("q", &["r", "s"]).unwrap().clone().build().unwrap();
        let m = encode(&p).unwrap();
        let (cols, weights) = m.rows().row(0);
        assert_eq!(cols, &[col(&p, "r"), col(&p, "s")]);
        assert_eq!(weights, &[0.5, 0.5]);
    }

    #[test]
    fn paper_program_structure() {
        let p = paper_program();
        let m = encode(&p).unwrap();
        let atom_p = p.symbols().lookup("p").unwrap();
        assert_eq!(m.aux_columns(), 2);
        assert_eq!(m.dim(), p.symbols().len() + 2);
        assert_eq!(m.aux_owner(m.atom_count()), Some(atom_p));
        assert_eq!(m.aux_owner(m.atom_count() + 1), Some(atom_p));
        assert_eq!(m.aux_owner(0), None);
        // 5 clause rows + 1 OR row
        assert_eq!(m.rows().rows(), 6);
        assert_eq!(m.row_kind(5), RowKind::Disjunctive);
        assert_eq!(m.row_target(5), atom_p.index());
        // body sizes 1+1+2+1+1, plus two alternatives of p
        assert_eq!(m.rows().nnz(), 6 + 2);
    }

    #[test]
    fn first_step_on_paper_program_derives_only_r() {
        let p = paper_program();
        let m = encode(&p).unwrap();
        let v0 = m.v0();
        let v1 = tp_step(&m, &v0).unwrap();
        let newly: Vec<usize> = (0..m.dim()).filter(|&c| v1[c] && !v0[c]).collect();
        assert_eq!(newly, vec![col(&p, "r") as usize]);
    }

    #[test]
    fn paper_program_fixpoint_is_p_r() {
        let p = paper_program();
        let model = minimal_model(&p).unwrap();
        assert_eq!(model.texts(p.symbols()), vec!["p", "r"]);
        assert_eq!(model.status, Status::Satisfiable);
    }

    #[test]
    fn fixpoint_is_stable_under_a_step() {
        let p = paper_program();
        let m = encode(&p).unwrap();
        let v = tp_fix(&m);
        assert_eq!(tp_step(&m, &v).unwrap(), v);
    }

    #[test]
    fn no_clauses_means_v0_is_the_fixpoint() {
        let p = ProgramBuilder::horn().build_allow_empty();
        let m = encode(&p).unwrap();
        assert_eq!(tp_step(&m, &m.v0()).unwrap(), m.v0());
        assert_eq!(tp_fix(&m), m.v0());
    }

    #[test]
    fn chain_of_one_hundred() {
        let mut b = ProgramBuilder::horn();
        b.fact("a1").unwrap();
        for i in 2..=100 {
            b.rule(&format!("a{i}"), &[&format!("a{}", i - 1)]).unwrap();
        }
        let p = b.build().unwrap();
        let m = encode(&p).unwrap();
        let (v, steps) = tp_fix_counted(&m);
        assert_eq!(steps, 100);
        assert_eq!(decode(&m, &v).len(), 100);
    }

    #[test]
    fn decode_reports_contradictions_and_hides_aux_columns() {
        let p = paper_program();
        let m = encode(&p).unwrap();
        let mut v = vec![true; m.dim()];
        v[col(&p, "s") as usize] = false;
        let model = decode(&m, &v);
        assert_eq!(model.status, Status::Unsatisfiable);
        assert_eq!(model.texts(p.symbols()), vec!["p", "q", "r"]);
    }

    #[test]
    fn step_input_validation() {
        let p = paper_program();
        let m = encode(&p).unwrap();
        assert_eq!(
            tp_step(&m, &[true]).unwrap_err(),
            MatrixError::DimensionMismatch {
                expected: m.dim(),
                found: 1
            }
        );
        assert_eq!(tp_step(&m, &vec![false; m.dim()]).unwrap_err(), MatrixError::TrueUnset);
    }

    #[test]
    fn disjunctive_row_fires_on_any_alternative() {
        let mut b = ProgramBuilder::horn();
        b.rule("h", &["a"]).unwrap().rule("h", &["b"]).unwrap().rule("h", &["c"]).unwrap();
        let p = b.build().unwrap();
        let m = encode(&p).unwrap();
        let or_row = (0..m.rows().rows()).find(|&r| m.row_kind(r) == RowKind::Disjunctive).unwrap();
        let h = col(&p, "h") as usize;
        for aux in 0..3 {
            let mut v = m.v0();
            v[m.atom_count() + aux] = true;
            let w = tp_step(&m, &v).unwrap();
            assert!(w[h], "alternative {aux} should fire row {or_row}");
        }
        let w = tp_step(&m, &m.v0()).unwrap();
        assert!(!w[h]);
    }
}
