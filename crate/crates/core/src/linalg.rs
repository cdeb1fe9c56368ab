//! Exact sparse linear algebra over Q(q^{1/2}).
//!
//! Kernels and rank come from fraction-managed Gaussian elimination with a
//! deterministic pivot rule (smallest entry complexity, ties broken by lowest
//! (row, col)); spectral resolution is candidate-driven, and the spectral
//! functional calculus builds the unique operator acting by a given function
//! of the eigenvalue on each eigenspace.

use crate::scalar::QScalar;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("spectral resolution incomplete: blocks cover {covered} of {dim} dimensions")]
    IncompleteResolution { covered: usize, dim: usize },
    #[error("matrices in the family do not commute (indices {0} and {1})")]
    NonCommuting(usize, usize),
    #[error("matrix is singular")]
    Singular,
}

/// Immutable sparse matrix; no stored entry is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), QScalar>,
}

/// Sparse column vector.
pub type SparseVec = BTreeMap<usize, QScalar>;

impl ExactMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = BTreeMap::new();
        for i in 0..n {
            entries.insert((i, i), QScalar::one());
        }
        ExactMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn from_entries(
        rows: usize,
        cols: usize,
        it: impl IntoIterator<Item = (usize, usize, QScalar)>,
    ) -> Self {
        let mut m = ExactMatrix::zero(rows, cols);
        for (r, c, v) in it {
            m.set(r, c, v);
        }
        m
    }

    pub fn diagonal(values: Vec<QScalar>) -> Self {
        let n = values.len();
        ExactMatrix::from_entries(
            n,
            n,
            values.into_iter().enumerate().map(|(i, v)| (i, i, v)),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn set(&mut self, r: usize, c: usize, v: QScalar) {
        assert!(r < self.rows && c < self.cols, "entry out of bounds");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> QScalar {
        self.entries
            .get(&(r, c))
            .cloned()
            .unwrap_or_else(QScalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &QScalar)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.keys().all(|&(r, c)| r == c)
    }

    /// The nonzero entry of maximal scalar complexity, as a failure witness.
    pub fn witness_entry(&self) -> Option<(usize, usize, QScalar)> {
        self.entries
            .iter()
            .max_by_key(|(&(r, c), v)| (v.complexity(), std::cmp::Reverse((r, c))))
            .map(|(&(r, c), v)| (r, c, v.clone()))
    }

    pub fn add(&self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "add shape");
        let mut out = self.clone();
        for (&(r, c), v) in &o.entries {
            let s = &out.get(r, c) + v;
            out.set(r, c, s);
        }
        out
    }

    pub fn sub(&self, o: &ExactMatrix) -> ExactMatrix {
        self.add(&o.scale(&QScalar::from_int(-1)))
    }

    pub fn scale(&self, a: &QScalar) -> ExactMatrix {
        if a.is_zero() {
            return ExactMatrix::zero(self.rows, self.cols);
        }
        let entries = self
            .entries
            .iter()
            .map(|(&k, v)| (k, a * v))
            .collect();
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn mul(&self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, o.rows, "mul shape");
        // Row-major sparse product.
        let mut by_row: BTreeMap<usize, Vec<(usize, &QScalar)>> = BTreeMap::new();
        for (&(r, c), v) in &o.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out: BTreeMap<(usize, usize), QScalar> = BTreeMap::new();
        for (&(r, k), a) in &self.entries {
            if let Some(cols) = by_row.get(&k) {
                for &(c, b) in cols {
                    let t = a * b;
                    if t.is_zero() {
                        continue;
                    }
                    match out.get_mut(&(r, c)) {
                        Some(acc) => *acc = &*acc + &t,
                        None => {
                            out.insert((r, c), t);
                        }
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        ExactMatrix {
            rows: self.rows,
            cols: o.cols,
            entries: out,
        }
    }

    pub fn transpose(&self) -> ExactMatrix {
        let entries = self
            .entries
            .iter()
            .map(|(&(r, c), v)| ((c, r), v.clone()))
            .collect();
        ExactMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn kron(&self, o: &ExactMatrix) -> ExactMatrix {
        let mut out = ExactMatrix::zero(self.rows * o.rows, self.cols * o.cols);
        for (&(r1, c1), a) in &self.entries {
            for (&(r2, c2), b) in &o.entries {
                let v = a * b;
                if !v.is_zero() {
                    out.entries
                        .insert((r1 * o.rows + r2, c1 * o.cols + c2), v);
                }
            }
        }
        out
    }

    pub fn commutator(&self, o: &ExactMatrix) -> ExactMatrix {
        self.mul(o).sub(&o.mul(self))
    }

    /// q-commutator [x, y]_{q^b} = xy - q^b yx.
    pub fn qcommutator(&self, o: &ExactMatrix, b: i64) -> ExactMatrix {
        self.mul(o).sub(&o.mul(self).scale(&QScalar::q_power(b)))
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out: SparseVec = BTreeMap::new();
        for (&(r, c), a) in &self.entries {
            if let Some(x) = v.get(&c) {
                let t = a * x;
                if t.is_zero() {
                    continue;
                }
                match out.get_mut(&r) {
                    Some(acc) => *acc = &*acc + &t,
                    None => {
                        out.insert(r, t);
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Stack matrices vertically (same column count).
    pub fn vstack(parts: &[&ExactMatrix]) -> ExactMatrix {
        assert!(!parts.is_empty());
        let cols = parts[0].cols;
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = ExactMatrix::zero(rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "vstack column mismatch");
            for (&(r, c), v) in &m.entries {
                out.entries.insert((r + off, c), v.clone());
            }
            off += m.rows;
        }
        out
    }

    /// Columns as sparse vectors.
    pub fn columns(&self) -> Vec<SparseVec> {
        let mut cols = vec![SparseVec::new(); self.cols];
        for (&(r, c), v) in &self.entries {
            cols[c].insert(r, v.clone());
        }
        cols
    }

    pub fn from_columns(rows: usize, cols: &[SparseVec]) -> ExactMatrix {
        let mut out = ExactMatrix::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (&i, v) in col {
                if !v.is_zero() {
                    out.entries.insert((i, j), v.clone());
                }
            }
        }
        out
    }

    /// Coordinate dump: header "rows cols nnz", then one "row col scalar" per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.rows, self.cols, self.entries.len());
        for (&(r, c), v) in &self.entries {
            let _ = writeln!(out, "{} {} {}", r, c, v);
        }
        out
    }

    /// Entrywise map (used for classical limits); `f` sees only nonzero entries.
    pub fn map_entries<E>(
        &self,
        mut f: impl FnMut(usize, usize, &QScalar) -> Result<QScalar, E>,
    ) -> Result<ExactMatrix, E> {
        let mut out = ExactMatrix::zero(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            out.set(r, c, f(r, c, v)?);
        }
        Ok(out)
    }
}

/// Row-echelon data for a matrix: reduced rows and their pivot columns.
struct Echelon {
    /// Rows in reduced form, each paired with its pivot column.
    rows: Vec<(usize, SparseVec)>,
    /// Columns >= this limit are bookkeeping only and never become pivots
    /// while an eligible column exists.
    pivot_limit: usize,
}

impl Echelon {
    fn new(pivot_limit: usize) -> Self {
        Echelon {
            rows: Vec::new(),
            pivot_limit,
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the current rows; returns the reduced vector.
    fn reduce(&self, mut v: SparseVec) -> SparseVec {
        for (p, row) in &self.rows {
            if let Some(c) = v.get(p).cloned() {
                if c.is_zero() {
                    v.remove(p);
                    continue;
                }
                for (&j, a) in row {
                    let delta = &c * a;
                    let cur = v.remove(&j).unwrap_or_else(QScalar::zero);
                    let nv = &cur - &delta;
                    if !nv.is_zero() {
                        v.insert(j, nv);
                    }
                }
            }
        }
        v
    }

    /// Insert a vector; returns true if it enlarged the span.
    fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce(v);
        if v.is_empty() {
            return false;
        }
        // Deterministic pivot: smallest scalar complexity, ties by lowest
        // column, eligible columns first.
        let (&pivot, pv) = v
            .iter()
            .filter(|(&j, _)| j < self.pivot_limit)
            .min_by_key(|(&j, a)| (a.complexity(), j))
            .or_else(|| v.iter().min_by_key(|(&j, a)| (a.complexity(), j)))
            .expect("nonempty");
        let pinv = pv.inv().expect("pivot nonzero");
        let mut row: SparseVec = v.iter().map(|(&j, a)| (j, &pinv * a)).collect();
        row.retain(|_, a| !a.is_zero());
        // Back-substitute into existing rows to keep reduced form.
        for (_, r) in self.rows.iter_mut() {
            if let Some(c) = r.get(&pivot).cloned() {
                if c.is_zero() {
                    r.remove(&pivot);
                    continue;
                }
                for (&j, a) in &row {
                    let delta = &c * a;
                    let cur = r.remove(&j).unwrap_or_else(QScalar::zero);
                    let nv = &cur - &delta;
                    if !nv.is_zero() {
                        r.insert(j, nv);
                    }
                }
            }
        }
        self.rows.push((pivot, row));
        true
    }

    fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.iter().map(|(j, _)| *j).collect();
        p.sort_unstable();
        p
    }
}

/// Rank of the matrix.
pub fn rank(m: &ExactMatrix) -> usize {
    let mut ech = Echelon::new(m.cols);
    let mut by_row: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for (&(r, c), v) in &m.entries {
        by_row.entry(r).or_default().insert(c, v.clone());
    }
    for (_, row) in by_row {
        ech.insert(row);
    }
    ech.rank()
}

/// Exact basis of the null space { v : M v = 0 }, deterministic.
///
/// Basis vectors are indexed by the free columns in increasing order; the
/// free coordinate is 1 and pivot coordinates are solved.
pub fn kernel(m: &ExactMatrix) -> Vec<SparseVec> {
    let mut ech = Echelon::new(m.cols);
    let mut by_row: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for (&(r, c), v) in &m.entries {
        by_row.entry(r).or_default().insert(c, v.clone());
    }
    for (_, row) in by_row {
        ech.insert(row);
    }
    let pivots = ech.pivots();
    let mut basis = Vec::new();
    for free in 0..m.cols {
        if pivots.binary_search(&free).is_ok() {
            continue;
        }
        let mut v: SparseVec = BTreeMap::new();
        v.insert(free, QScalar::one());
        for (p, row) in &ech.rows {
            if let Some(a) = row.get(&free) {
                if !a.is_zero() {
                    v.insert(*p, -a);
                }
            }
        }
        basis.push(v);
    }
    basis
}

/// Solve M x = b for square invertible M; errors if singular.
pub fn solve(m: &ExactMatrix, b: &SparseVec) -> Result<SparseVec, LinalgError> {
    let inv = invert(m)?;
    Ok(inv.apply(b))
}

/// Exact inverse via Gauss-Jordan on [M | I].
pub fn invert(m: &ExactMatrix) -> Result<ExactMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Dimension("invert needs a square matrix".into()));
    }
    let n = m.rows;
    // Fast path for diagonal matrices (K-type operators).
    if m.is_diagonal() {
        if m.entries.len() < n {
            return Err(LinalgError::Singular);
        }
        let mut out = ExactMatrix::zero(n, n);
        for (&(r, _), v) in &m.entries {
            out.entries
                .insert((r, r), v.inv().map_err(|_| LinalgError::Singular)?);
        }
        return Ok(out);
    }
    // Augmented rows: col indices 0..n are M, n..2n are I.
    let mut rows: Vec<SparseVec> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = SparseVec::new();
        row.insert(n + i, QScalar::one());
        rows.push(row);
    }
    for (&(r, c), v) in &m.entries {
        rows[r].insert(c, v.clone());
    }
    let mut ech = Echelon::new(n);
    for row in rows {
        ech.insert(row);
    }
    // All of columns 0..n must be pivots.
    let mut sol = vec![SparseVec::new(); n];
    let mut seen = 0usize;
    for (p, row) in &ech.rows {
        if *p >= n {
            return Err(LinalgError::Singular);
        }
        seen += 1;
        for (&j, a) in row {
            if j >= n && !a.is_zero() {
                sol[*p].insert(j - n, a.clone());
            }
        }
    }
    if seen != n {
        return Err(LinalgError::Singular);
    }
    let mut out = ExactMatrix::zero(n, n);
    for (i, row) in sol.into_iter().enumerate() {
        for (j, v) in row {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// One eigenvalue block of a spectral resolution.
#[derive(Clone, Debug)]
pub struct SpectralBlock {
    pub eigenvalue: QScalar,
    pub basis: Vec<SparseVec>,
}

/// Candidate-driven spectral data for a square matrix.
#[derive(Clone, Debug)]
pub struct SpectralResolution {
    pub dim: usize,
    pub blocks: Vec<SpectralBlock>,
    pub complete: bool,
}

impl SpectralResolution {
    pub fn covered(&self) -> usize {
        self.blocks.iter().map(|b| b.basis.len()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<QScalar> {
        self.blocks.iter().map(|b| b.eigenvalue.clone()).collect()
    }
}

/// For each candidate eigenvalue, the kernel of (M - c Id); nonempty blocks
/// only. `complete` is set when the block dimensions sum to the full dimension.
pub fn spectral_resolve(m: &ExactMatrix, candidates: &[QScalar]) -> SpectralResolution {
    assert!(m.is_square(), "spectral_resolve needs a square matrix");
    let n = m.rows;
    let mut blocks = Vec::new();
    let mut covered = 0usize;
    let mut seen: Vec<QScalar> = Vec::new();
    for c in candidates {
        if seen.contains(c) {
            continue;
        }
        seen.push(c.clone());
        if covered == n {
            break;
        }
        let shifted = m.sub(&ExactMatrix::identity(n).scale(c));
        let basis = kernel(&shifted);
        if !basis.is_empty() {
            covered += basis.len();
            blocks.push(SpectralBlock {
                eigenvalue: c.clone(),
                basis,
            });
        }
    }
    SpectralResolution {
        dim: n,
        blocks,
        complete: covered == n,
    }
}

/// The unique operator acting as `f(lambda)` on each eigenspace of a complete
/// resolution.
pub fn spectral_function(
    r: &SpectralResolution,
    mut f: impl FnMut(&QScalar) -> QScalar,
) -> Result<ExactMatrix, LinalgError> {
    if !r.complete {
        return Err(LinalgError::IncompleteResolution {
            covered: r.covered(),
            dim: r.dim,
        });
    }
    let n = r.dim;
    // P has the eigenvectors as columns; result = P diag(f) P^{-1}.
    let mut cols: Vec<SparseVec> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for b in &r.blocks {
        let fv = f(&b.eigenvalue);
        for v in &b.basis {
            cols.push(v.clone());
            values.push(fv.clone());
        }
    }
    let p = ExactMatrix::from_columns(n, &cols);
    let pinv = invert(&p)?;
    let d = ExactMatrix::diagonal(values);
    Ok(p.mul(&d).mul(&pinv))
}

/// A joint eigenspace of a commuting family, labeled by its eigenvalue tuple.
#[derive(Clone, Debug)]
pub struct JointBlock {
    pub eigenvalues: Vec<QScalar>,
    pub basis: Vec<SparseVec>,
}

/// Common refinement of eigenspaces of a pairwise-commuting family.
///
/// `candidates[k]` is the eigenvalue candidate list for `family[k]`. Blocks
/// come back in deterministic order (candidate order, refined left to right).
pub fn simultaneous_eigenbasis(
    family: &[ExactMatrix],
    candidates: &[Vec<QScalar>],
) -> Result<(Vec<JointBlock>, bool), LinalgError> {
    assert_eq!(family.len(), candidates.len());
    if family.is_empty() {
        return Ok((Vec::new(), true));
    }
    let n = family[0].rows;
    for (i, a) in family.iter().enumerate() {
        if !a.is_square() || a.rows != n {
            return Err(LinalgError::Dimension("family shape mismatch".into()));
        }
        for (j, b) in family.iter().enumerate().skip(i + 1) {
            if !a.commutator(b).is_zero() {
                return Err(LinalgError::NonCommuting(i, j));
            }
        }
    }
    let mut blocks = vec![JointBlock {
        eigenvalues: Vec::new(),
        basis: (0..n)
            .map(|i| {
                let mut v = SparseVec::new();
                v.insert(i, QScalar::one());
                v
            })
            .collect(),
    }];
    let mut complete = true;
    for (m, cands) in family.iter().zip(candidates) {
        let mut next = Vec::new();
        for block in blocks {
            let basis_mat = ExactMatrix::from_columns(n, &block.basis);
            let restricted = restrict_to_span(m, &basis_mat)?;
            let res = spectral_resolve(&restricted, cands);
            if !res.complete {
                complete = false;
            }
            for sb in res.blocks {
                // Lift block coordinates back through the basis.
                let lifted: Vec<SparseVec> = sb
                    .basis
                    .iter()
                    .map(|v| {
                        let mut out = SparseVec::new();
                        for (&k, c) in v {
                            for (&i, b) in &block.basis[k] {
                                let t = c * b;
                                if t.is_zero() {
                                    continue;
                                }
                                let cur = out.remove(&i).unwrap_or_else(QScalar::zero);
                                let nv = &cur + &t;
                                if !nv.is_zero() {
                                    out.insert(i, nv);
                                }
                            }
                        }
                        out
                    })
                    .collect();
                let mut eigs = block.eigenvalues.clone();
                eigs.push(sb.eigenvalue);
                next.push(JointBlock {
                    eigenvalues: eigs,
                    basis: lifted,
                });
            }
        }
        blocks = next;
    }
    Ok((blocks, complete))
}

/// Express the action of `m` on the span of the columns of `basis` in basis
/// coordinates: returns S with m * basis = basis * S. Errors if the span is
/// not invariant.
pub fn restrict_to_span(m: &ExactMatrix, basis: &ExactMatrix) -> Result<ExactMatrix, LinalgError> {
    let k = basis.cols();
    let image = m.mul(basis);
    let coords = coordinates_in_span(basis, &image.columns())?;
    Ok(ExactMatrix::from_columns(k, &coords))
}

/// Solve basis * x_j = v_j for each vector; errors if some v_j is outside the span.
pub fn coordinates_in_span(
    basis: &ExactMatrix,
    vectors: &[SparseVec],
) -> Result<Vec<SparseVec>, LinalgError> {
    // Echelonize the basis columns as rows over ambient coordinates 0..n,
    // with bookkeeping coordinates n.. tracking each row's expression in the
    // original columns.
    let n = basis.rows();
    let mut ech = Echelon::new(n);
    for (j, col) in basis.columns().into_iter().enumerate() {
        let mut row: SparseVec = col;
        row.insert(n + j, QScalar::one());
        ech.insert(row);
    }
    let mut out = Vec::with_capacity(vectors.len());
    for v in vectors {
        let reduced = ech.reduce(v.clone());
        let mut coord = SparseVec::new();
        for (j, a) in reduced {
            if j < n {
                if !a.is_zero() {
                    return Err(LinalgError::Dimension(
                        "vector outside the spanned subspace".into(),
                    ));
                }
            } else if !a.is_zero() {
                coord.insert(j - n, -&a);
            }
        }
        out.push(coord);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qint;

    fn q() -> QScalar {
        QScalar::q_power(1)
    }

    #[test]
    fn kernel_basics() {
        let z = ExactMatrix::zero(3, 3);
        assert_eq!(kernel(&z).len(), 3);
        let id = ExactMatrix::identity(4);
        assert!(kernel(&id).is_empty());
        // [[1, q], [q^-1, 1]] has the 1-dimensional kernel spanned by (q, -1).
        let m = ExactMatrix::from_entries(
            2,
            2,
            [
                (0, 0, QScalar::one()),
                (0, 1, q()),
                (1, 0, QScalar::q_power(-1)),
                (1, 1, QScalar::one()),
            ],
        );
        let ker = kernel(&m);
        assert_eq!(ker.len(), 1);
        let v = &ker[0];
        // Up to scale, v = (q, -1): check m v = 0 and the ratio.
        assert!(m.apply(v).is_empty());
        let ratio = &v[&0] / &v[&1];
        assert_eq!(ratio, -&q());
    }

    #[test]
    fn rank_kernel_consistency() {
        let m = ExactMatrix::from_entries(
            3,
            4,
            [
                (0, 0, QScalar::one()),
                (0, 2, q()),
                (1, 1, qint(2, 1)),
                (2, 0, QScalar::from_int(2)),
                (2, 2, (&q() + &q())),
            ],
        );
        assert_eq!(rank(&m) + kernel(&m).len(), m.cols());
    }

    #[test]
    fn spectral_diag() {
        let m = ExactMatrix::diagonal(vec![q(), QScalar::q_power(-1)]);
        let res = spectral_resolve(&m, &[q(), QScalar::q_power(-1)]);
        assert!(res.complete);
        assert_eq!(res.blocks.len(), 2);
    }

    #[test]
    fn spectral_offdiag_and_function() {
        // [[0,1],[1,0]]: eigenvalues 1 and -1.
        let m = ExactMatrix::from_entries(
            2,
            2,
            [(0, 1, QScalar::one()), (1, 0, QScalar::one())],
        );
        let res = spectral_resolve(&m, &[QScalar::one(), QScalar::from_int(-1)]);
        assert!(res.complete);
        assert_eq!(res.blocks.len(), 2);
        for b in &res.blocks {
            for v in &b.basis {
                let mv = m.apply(v);
                let ev: SparseVec = v.iter().map(|(&i, a)| (i, &b.eigenvalue * a)).collect();
                let ev: SparseVec = ev.into_iter().filter(|(_, a)| !a.is_zero()).collect();
                assert_eq!(mv, ev);
            }
        }
        let incomplete = spectral_resolve(&m, &[QScalar::one()]);
        assert!(!incomplete.complete);
        assert_eq!(incomplete.blocks.len(), 1);

        // Identity function reconstructs the matrix.
        let back = spectral_function(&res, |c| c.clone()).unwrap();
        assert_eq!(back, m);
        // Eigenvalue [m] -> q^m sends [[0,1],[1,0]] (eigenvalues [1], [-1])
        // to the operator with eigenvalues q, q^-1 on the same eigenvectors.
        let ell = spectral_function(&res, |c| {
            if c.is_one() {
                q()
            } else {
                QScalar::q_power(-1)
            }
        })
        .unwrap();
        // ell - ell^-1 = (q - q^-1) m.
        let elli = invert(&ell).unwrap();
        let lhs = ell.sub(&elli);
        let rhs = m.scale(&(&q() - &QScalar::q_power(-1)));
        assert_eq!(lhs, rhs);
        let const_one = spectral_function(&res, |_| QScalar::one()).unwrap();
        assert_eq!(const_one, ExactMatrix::identity(2));
    }

    #[test]
    fn joint_blocks() {
        let id = ExactMatrix::identity(2);
        let (blocks, complete) =
            simultaneous_eigenbasis(&[id.clone(), id.clone()], &[vec![QScalar::one()], vec![QScalar::one()]])
                .unwrap();
        assert!(complete);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].eigenvalues, vec![QScalar::one(), QScalar::one()]);

        let d1 = ExactMatrix::diagonal(vec![q(), QScalar::q_power(-1)]);
        let d2 = ExactMatrix::identity(2);
        let (blocks, complete) = simultaneous_eigenbasis(
            &[d1, d2],
            &[vec![q(), QScalar::q_power(-1)], vec![QScalar::one()]],
        )
        .unwrap();
        assert!(complete);
        assert_eq!(blocks.len(), 2);
    }

    #[test]
    fn noncommuting_rejected() {
        let a = ExactMatrix::from_entries(2, 2, [(0, 1, QScalar::one())]);
        let b = ExactMatrix::from_entries(2, 2, [(1, 0, QScalar::one())]);
        let err = simultaneous_eigenbasis(
            &[a, b],
            &[vec![QScalar::zero()], vec![QScalar::zero()]],
        );
        assert!(matches!(err, Err(LinalgError::NonCommuting(0, 1))));
    }

    #[test]
    fn invert_roundtrip() {
        let m = ExactMatrix::from_entries(
            2,
            2,
            [
                (0, 0, q()),
                (0, 1, QScalar::one()),
                (1, 1, QScalar::q_power(-1)),
            ],
        );
        let inv = invert(&m).unwrap();
        assert_eq!(m.mul(&inv), ExactMatrix::identity(2));
        let sing = ExactMatrix::from_entries(2, 2, [(0, 0, QScalar::one())]);
        assert!(invert(&sing).is_err());
    }

    #[test]
    fn dump_format() {
        let m = ExactMatrix::from_entries(2, 3, [(0, 1, q())]);
        assert_eq!(m.dump(), "2 3 1\n0 1 q\n");
    }

    #[test]
    fn spectral_function_composes() {
        // Diagonalizable non-diagonal matrix: P diag(q, 1, q^-1) P^-1.
        let p = ExactMatrix::from_entries(
            3,
            3,
            [
                (0, 0, QScalar::one()),
                (0, 1, QScalar::one()),
                (1, 1, QScalar::one()),
                (1, 2, q()),
                (2, 2, QScalar::one()),
            ],
        );
        let d = ExactMatrix::diagonal(vec![q(), QScalar::one(), QScalar::q_power(-1)]);
        let m = p.mul(&d).mul(&invert(&p).unwrap());
        let cands = vec![q(), QScalar::one(), QScalar::q_power(-1)];
        let res = spectral_resolve(&m, &cands);
        assert!(res.complete);
        let f = |c: &QScalar| c * c;
        let g = |c: &QScalar| &(c * c) * c;
        // Apply f, re-resolve, apply g; compare against g(f(.)) in one pass.
        let mf = spectral_function(&res, f).unwrap();
        let f_cands: Vec<QScalar> = cands.iter().map(|c| f(c)).collect();
        let res_f = spectral_resolve(&mf, &f_cands);
        assert!(res_f.complete);
        let two_step = spectral_function(&res_f, g).unwrap();
        let one_step = spectral_function(&res, |c| g(&f(c))).unwrap();
        assert_eq!(two_step, one_step);
    }

    proptest::proptest! {
        #[test]
        fn rank_nullity_on_random_sparse(entries in proptest::collection::vec(
            (0usize..5, 0usize..6, -3i64..=3), 0..12)) {
            let m = ExactMatrix::from_entries(
                5,
                6,
                entries
                    .into_iter()
                    .map(|(r, c, v)| (r, c, QScalar::from_int(v))),
            );
            proptest::prop_assert_eq!(rank(&m) + kernel(&m).len(), m.cols());
            // Every kernel vector is annihilated exactly.
            for v in kernel(&m) {
                proptest::prop_assert!(m.apply(&v).is_empty());
            }
        }
    }
}
