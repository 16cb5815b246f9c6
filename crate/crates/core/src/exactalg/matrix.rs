use std::collections::BTreeMap;

use super::ring::{FieldScalar, Scalar};

/// Sparse vector, indexed ascending, with no stored zero entries.
pub type SparseVec<T> = BTreeMap<usize, T>;

/// Row-major sparse matrix with no stored zero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T: Scalar> {
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseVec<T>>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            rows: vec![BTreeMap::new(); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.rows[i].insert(i, T::one());
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &SparseVec<T> {
        &self.rows[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<T>> {
        self.rows.iter()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.rows[i].get(&j).cloned().unwrap_or_else(T::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.nrows && j < self.ncols, "index out of bounds");
        if v.is_zero() {
            self.rows[i].remove(&j);
        } else {
            self.rows[i].insert(j, v);
        }
    }

    /// Adds `v` to entry (i, j), dropping it if the sum is zero.
    pub fn add_entry(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.nrows && j < self.ncols, "index out of bounds");
        if v.is_zero() {
            return;
        }
        let cur = self.rows[i].remove(&j);
        let sum = match cur {
            Some(c) => c.add(&v),
            None => v,
        };
        if !sum.is_zero() {
            self.rows[i].insert(j, sum);
        }
    }

    pub fn from_rows(nrows: usize, ncols: usize, rows: Vec<SparseVec<T>>) -> Self {
        assert_eq!(rows.len(), nrows);
        SparseMatrix { nrows, ncols, rows }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.ncols, self.nrows);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                t.rows[*j].insert(i, v.clone());
            }
        }
        t
    }

    /// Matrix product self * other.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch");
        let mut out = Self::zero(self.nrows, other.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for (k, a) in row {
                for (j, b) in &other.rows[*k] {
                    out.add_entry(i, *j, a.mul(b));
                }
            }
        }
        out
    }

    /// Matrix-vector product self * v, with v a sparse column vector.
    pub fn apply(&self, v: &SparseVec<T>) -> SparseVec<T> {
        let mut out: SparseVec<T> = BTreeMap::new();
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = T::zero();
            let mut any = false;
            for (j, a) in row {
                if let Some(x) = v.get(j) {
                    acc = acc.add(&a.mul(x));
                    any = true;
                }
            }
            if any && !acc.is_zero() {
                out.insert(i, acc);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    /// Restriction to the given rows and columns, reindexed densely in the
    /// given order.
    pub fn submatrix(&self, row_ids: &[usize], col_ids: &[usize]) -> Self {
        let col_pos: BTreeMap<usize, usize> =
            col_ids.iter().enumerate().map(|(p, c)| (*c, p)).collect();
        let mut out = Self::zero(row_ids.len(), col_ids.len());
        for (p, i) in row_ids.iter().enumerate() {
            for (j, v) in &self.rows[*i] {
                if let Some(q) = col_pos.get(j) {
                    out.rows[p].insert(*q, v.clone());
                }
            }
        }
        out
    }
}

impl<T: FieldScalar> SparseMatrix<T> {
    /// In-place reduction to row echelon form.
    ///
    /// Returns the pivot positions as (row, col) pairs in elimination order.
    /// Pivot rows are chosen by fewest entries to limit fill-in; ties break
    /// on the lower row index, so the reduction is deterministic.
    pub fn row_echelon(&mut self) -> Vec<(usize, usize)> {
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..self.ncols {
            let mut best: Option<(usize, usize)> = None;
            for r in next_row..self.nrows {
                if self.rows[r].contains_key(&col) {
                    let nnz = self.rows[r].len();
                    if best.map(|(_, b)| nnz < b).unwrap_or(true) {
                        best = Some((r, nnz));
                    }
                }
            }
            let Some((r, _)) = best else { continue };
            self.rows.swap(next_row, r);
            let inv = self.rows[next_row][&col].inv();
            let pivot_row: Vec<(usize, T)> = self.rows[next_row]
                .iter()
                .map(|(j, v)| (*j, v.mul(&inv)))
                .collect();
            self.rows[next_row] = pivot_row.iter().cloned().collect();
            for r2 in 0..self.nrows {
                if r2 == next_row {
                    continue;
                }
                let Some(f) = self.rows[r2].get(&col).cloned() else {
                    continue;
                };
                for (j, v) in &pivot_row {
                    let delta = f.mul(v).neg();
                    if delta.is_zero() {
                        continue;
                    }
                    let cur = self.rows[r2].remove(j);
                    let sum = match cur {
                        Some(c) => c.add(&delta),
                        None => delta,
                    };
                    if !sum.is_zero() {
                        self.rows[r2].insert(*j, sum);
                    }
                }
            }
            pivots.push((next_row, col));
            next_row += 1;
            if next_row == self.nrows {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().row_echelon().len()
    }

    /// Basis of the right kernel, as sparse column vectors of length ncols.
    pub fn kernel_basis(&self) -> Vec<SparseVec<T>> {
        let mut m = self.clone();
        let pivots = m.row_echelon();
        let pivot_cols: BTreeMap<usize, usize> =
            pivots.iter().map(|(r, c)| (*c, *r)).collect();
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if pivot_cols.contains_key(&free) {
                continue;
            }
            let mut v: SparseVec<T> = BTreeMap::new();
            v.insert(free, T::one());
            // Reduced echelon rows have a single entry in each pivot column.
            for (c, r) in &pivot_cols {
                if let Some(a) = m.rows[*r].get(&free) {
                    v.insert(*c, a.neg());
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Dimension of the span of the given vectors (as rows of a matrix).
    pub fn span_dim(ncols: usize, vectors: &[SparseVec<T>]) -> usize {
        let m = SparseMatrix::from_rows(vectors.len(), ncols, vectors.to_vec());
        m.rank()
    }

    /// True if `v` lies in the span of `vectors`.
    pub fn in_span(ncols: usize, vectors: &[SparseVec<T>], v: &SparseVec<T>) -> bool {
        let base = Self::span_dim(ncols, vectors);
        let mut all = vectors.to_vec();
        all.push(v.clone());
        Self::span_dim(ncols, &all) == base
    }

    /// Dimension added by `added` over the span of `base`: the rank of the
    /// images of `added` in the quotient by span(base).
    pub fn rank_modulo(ncols: usize, base: &[SparseVec<T>], added: &[SparseVec<T>]) -> usize {
        let b = Self::span_dim(ncols, base);
        let mut all = base.to_vec();
        all.extend(added.iter().cloned());
        Self::span_dim(ncols, &all) - b
    }
}

/// Scalar multiple of a sparse vector.
pub fn scale_vec<T: Scalar>(v: &SparseVec<T>, by: &T) -> SparseVec<T> {
    if by.is_zero() {
        return BTreeMap::new();
    }
    v.iter().map(|(i, x)| (*i, x.mul(by))).collect()
}

/// Sum of two sparse vectors.
pub fn add_vec<T: Scalar>(a: &SparseVec<T>, b: &SparseVec<T>) -> SparseVec<T> {
    let mut out = a.clone();
    for (i, x) in b {
        let cur = out.remove(i);
        let sum = match cur {
            Some(c) => c.add(x),
            None => x.clone(),
        };
        if !sum.is_zero() {
            out.insert(*i, sum);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::ring::{Mod2, Rat, Scalar};
    use super::*;

    fn rat(v: i64) -> Rat {
        Rat::from_i64(v)
    }

    #[test]
    fn echelon_rank_and_kernel() {
        // [[1, 2, 3], [2, 4, 6], [0, 1, 1]] has rank 2.
        let mut m = SparseMatrix::<Rat>::zero(3, 3);
        for (i, j, v) in [
            (0, 0, 1),
            (0, 1, 2),
            (0, 2, 3),
            (1, 0, 2),
            (1, 1, 4),
            (1, 2, 6),
            (2, 1, 1),
            (2, 2, 1),
        ] {
            m.set(i, j, rat(v));
        }
        assert_eq!(m.rank(), 2);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 1);
        for v in &ker {
            assert!(m.apply(v).is_empty());
        }
    }

    #[test]
    fn kernel_vectors_are_in_kernel_mod2() {
        let mut m = SparseMatrix::<Mod2>::zero(2, 4);
        m.set(0, 0, Mod2(true));
        m.set(0, 1, Mod2(true));
        m.set(1, 2, Mod2(true));
        m.set(1, 3, Mod2(true));
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.apply(v).is_empty());
        }
    }

    #[test]
    fn matmul_against_dense() {
        let mut a = SparseMatrix::<Rat>::zero(2, 3);
        let mut b = SparseMatrix::<Rat>::zero(3, 2);
        a.set(0, 0, rat(1));
        a.set(0, 2, rat(2));
        a.set(1, 1, rat(-3));
        b.set(0, 1, rat(4));
        b.set(1, 0, rat(5));
        b.set(2, 1, rat(1));
        let c = a.matmul(&b);
        assert_eq!(c.get(0, 1), rat(6));
        assert_eq!(c.get(1, 0), rat(-15));
        assert_eq!(c.get(0, 0), rat(0));
    }

    #[test]
    fn span_membership() {
        let v1: SparseVec<Rat> = [(0, rat(1)), (1, rat(1))].into_iter().collect();
        let v2: SparseVec<Rat> = [(1, rat(1)), (2, rat(1))].into_iter().collect();
        let inside: SparseVec<Rat> = [(0, rat(1)), (2, rat(-1))].into_iter().collect();
        let outside: SparseVec<Rat> = [(0, rat(1))].into_iter().collect();
        let basis = vec![v1, v2];
        assert!(SparseMatrix::in_span(3, &basis, &inside));
        assert!(!SparseMatrix::in_span(3, &basis, &outside));
    }
}
