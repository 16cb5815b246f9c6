
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::matrix::SparseMatrix;
use super::ring::{FieldScalar, Int, Scalar};
use super::snf::smith_normal_form;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("d^2 != 0 between degrees {from} and {to}")]
    NotAChainComplex { from: i64, to: i64 },
    #[error("differential entry from degree {degree} violates the grading rule (j {from_j} -> {to_j})")]
    GradingViolation { degree: i64, from_j: i64, to_j: i64 },
    #[error("dimension mismatch in differential out of degree {degree}")]
    DimensionMismatch { degree: i64 },
}

/// Shared storage: bases with one integer grading per element, plus the
/// differentials d_i : C_i -> C_{i+1} as sparse matrices.
#[derive(Debug, Clone)]
pub(crate) struct ChainData<T: Scalar> {
    pub min_degree: i64,
    /// Quantum grading (or filtration level) of each basis element, one Vec
    /// per homological degree starting at `min_degree`.
    pub gradings: Vec<Vec<i64>>,
    /// `diffs[k]` maps degree `min_degree + k` to `min_degree + k + 1`; the
    /// last entry maps to the zero space.
    pub diffs: Vec<SparseMatrix<T>>,
}

impl<T: Scalar> ChainData<T> {
    fn validate_shape(&self) -> Result<(), ComplexError> {
        for (k, d) in self.diffs.iter().enumerate() {
            let next = self.gradings.get(k + 1).map(|g| g.len()).unwrap_or(0);
            if d.ncols() != self.gradings[k].len() || d.nrows() != next {
                return Err(ComplexError::DimensionMismatch {
                    degree: self.min_degree + k as i64,
                });
            }
        }
        Ok(())
    }

    fn validate_d_squared(&self) -> Result<(), ComplexError> {
        for k in 0..self.diffs.len().saturating_sub(1) {
            if !self.diffs[k + 1].matmul(&self.diffs[k]).is_zero() {
                return Err(ComplexError::NotAChainComplex {
                    from: self.min_degree + k as i64,
                    to: self.min_degree + k as i64 + 2,
                });
            }
        }
        Ok(())
    }

    fn index_of(&self, degree: i64) -> Option<usize> {
        if degree < self.min_degree {
            return None;
        }
        let k = (degree - self.min_degree) as usize;
        (k < self.gradings.len()).then_some(k)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.gradings.len()).map(|k| self.min_degree + k as i64)
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.index_of(degree)
            .map(|k| self.gradings[k].len())
            .unwrap_or(0)
    }

    pub fn gradings_at(&self, degree: i64) -> &[i64] {
        self.index_of(degree)
            .map(|k| self.gradings[k].as_slice())
            .unwrap_or(&[])
    }

    pub fn diff_from(&self, degree: i64) -> Option<&SparseMatrix<T>> {
        self.index_of(degree).and_then(|k| self.diffs.get(k))
    }

    pub fn total_dim(&self) -> usize {
        self.gradings.iter().map(|g| g.len()).sum()
    }
}

/// Chain complex with homological grading and a quantum grading preserved by
/// the differential.
#[derive(Debug, Clone)]
pub struct GradedChainComplex<T: Scalar> {
    pub(crate) data: ChainData<T>,
}

impl<T: Scalar> GradedChainComplex<T> {
    pub fn new(
        min_degree: i64,
        gradings: Vec<Vec<i64>>,
        diffs: Vec<SparseMatrix<T>>,
    ) -> Result<Self, ComplexError> {
        let data = ChainData {
            min_degree,
            gradings,
            diffs,
        };
        data.validate_shape()?;
        for k in 0..data.diffs.len() {
            let source = &data.gradings[k];
            let empty = Vec::new();
            let target = data.gradings.get(k + 1).unwrap_or(&empty);
            for (r, row) in data.diffs[k].rows().enumerate() {
                for (c, _) in row {
                    if target[r] != source[*c] {
                        return Err(ComplexError::GradingViolation {
                            degree: data.min_degree + k as i64,
                            from_j: source[*c],
                            to_j: target[r],
                        });
                    }
                }
            }
        }
        data.validate_d_squared()?;
        Ok(GradedChainComplex { data })
    }

    pub fn min_degree(&self) -> i64 {
        self.data.min_degree
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.data.degrees().collect()
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.data.dim(degree)
    }

    pub fn gradings_at(&self, degree: i64) -> &[i64] {
        self.data.gradings_at(degree)
    }

    pub fn diff_from(&self, degree: i64) -> Option<&SparseMatrix<T>> {
        self.data.diff_from(degree)
    }

    pub fn total_dim(&self) -> usize {
        self.data.total_dim()
    }

    /// Positions of the degree-`i` basis elements with quantum grading `j`.
    fn block(&self, degree: i64, j: i64) -> Vec<usize> {
        self.data
            .gradings_at(degree)
            .iter()
            .enumerate()
            .filter_map(|(p, g)| (*g == j).then_some(p))
            .collect()
    }

    fn quantum_values(&self, degree: i64) -> Vec<i64> {
        let mut js: Vec<i64> = self.data.gradings_at(degree).to_vec();
        js.sort_unstable();
        js.dedup();
        js
    }

    /// The j-homogeneous block of d restricted to (degree, j) -> (degree+1, j).
    fn diff_block(&self, degree: i64, j: i64) -> SparseMatrix<T> {
        let cols = self.block(degree, j);
        let rows = self.block(degree + 1, j);
        match self.data.diff_from(degree) {
            Some(d) => d.submatrix(&rows, &cols),
            None => SparseMatrix::zero(rows.len(), cols.len()),
        }
    }
}

/// Chain complex whose quantum grading is weakened to a filtration: every
/// differential entry raises j by a nonnegative multiple of `step`.
#[derive(Debug, Clone)]
pub struct FilteredChainComplex<T: Scalar> {
    pub(crate) data: ChainData<T>,
    step: i64,
}

impl<T: Scalar> FilteredChainComplex<T> {
    pub fn new(
        min_degree: i64,
        levels: Vec<Vec<i64>>,
        diffs: Vec<SparseMatrix<T>>,
        step: i64,
    ) -> Result<Self, ComplexError> {
        assert!(step > 0, "filtration step must be positive");
        let data = ChainData {
            min_degree,
            gradings: levels,
            diffs,
        };
        data.validate_shape()?;
        for k in 0..data.diffs.len() {
            let source = &data.gradings[k];
            let empty = Vec::new();
            let target = data.gradings.get(k + 1).unwrap_or(&empty);
            for (r, row) in data.diffs[k].rows().enumerate() {
                for (c, _) in row {
                    let jump = target[r] - source[*c];
                    if jump < 0 || jump % step != 0 {
                        return Err(ComplexError::GradingViolation {
                            degree: data.min_degree + k as i64,
                            from_j: source[*c],
                            to_j: target[r],
                        });
                    }
                }
            }
        }
        data.validate_d_squared()?;
        Ok(FilteredChainComplex { data, step })
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    pub fn min_degree(&self) -> i64 {
        self.data.min_degree
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.data.degrees().collect()
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.data.dim(degree)
    }

    pub fn levels_at(&self, degree: i64) -> &[i64] {
        self.data.gradings_at(degree)
    }

    pub fn diff_from(&self, degree: i64) -> Option<&SparseMatrix<T>> {
        self.data.diff_from(degree)
    }

    pub fn total_dim(&self) -> usize {
        self.data.total_dim()
    }
}

/// Homology ranks and torsion per bidegree. Cells with no homology are
/// omitted; for field coefficients the torsion lists are empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyCell {
    pub i: i64,
    pub j: i64,
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct HomologySummary {
    pub cells: Vec<HomologyCell>,
}

impl HomologySummary {
    pub fn cell(&self, i: i64, j: i64) -> Option<&HomologyCell> {
        self.cells.iter().find(|c| c.i == i && c.j == j)
    }

    pub fn total_rank(&self) -> usize {
        self.cells.iter().map(|c| c.free_rank).sum()
    }

    pub fn rank_at_degree(&self, i: i64) -> usize {
        self.cells
            .iter()
            .filter(|c| c.i == i)
            .map(|c| c.free_rank)
            .sum()
    }

    /// Homological degrees carrying nonzero free rank.
    pub fn degree_support(&self) -> Vec<i64> {
        let mut s: Vec<i64> = self
            .cells
            .iter()
            .filter(|c| c.free_rank > 0)
            .map(|c| c.i)
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn has_torsion(&self) -> bool {
        self.cells.iter().any(|c| !c.torsion.is_empty())
    }

    fn push_nonempty(&mut self, cell: HomologyCell) {
        if cell.free_rank > 0 || !cell.torsion.is_empty() {
            self.cells.push(cell);
        }
    }

    fn sort(&mut self) {
        self.cells.sort_by_key(|c| (c.i, c.j));
    }
}

impl<T: FieldScalar> GradedChainComplex<T> {
    /// Homology over a field: free rank per (i, j), computed blockwise since
    /// the differential preserves j.
    pub fn homology(&self) -> HomologySummary {
        let mut out = HomologySummary::default();
        for i in self.data.degrees() {
            for j in self.quantum_values(i) {
                let d_out = self.diff_block(i, j);
                let d_in = self.diff_block(i - 1, j);
                let nullity = d_out.ncols() - d_out.rank();
                let free_rank = nullity - d_in.rank();
                out.push_nonempty(HomologyCell {
                    i,
                    j,
                    free_rank,
                    torsion: Vec::new(),
                });
            }
        }
        out.sort();
        out
    }
}

impl GradedChainComplex<Int> {
    /// Integral homology: free ranks from exact nullity/rank, torsion from
    /// the Smith normal form of the incoming differential block.
    pub fn homology_integral(&self) -> HomologySummary {
        let mut out = HomologySummary::default();
        for i in self.data.degrees() {
            for j in self.quantum_values(i) {
                let d_out = self.diff_block(i, j);
                let d_in = self.diff_block(i - 1, j);
                let rank_out = int_rank(&d_out);
                let snf_in = smith_normal_form(&d_in);
                let nullity = d_out.ncols() - rank_out;
                let free_rank = nullity - snf_in.rank();
                let torsion: Vec<i64> = snf_in
                    .torsion()
                    .iter()
                    .map(|t| t.to_i64().expect("torsion coefficient fits in i64"))
                    .collect();
                out.push_nonempty(HomologyCell {
                    i,
                    j,
                    free_rank,
                    torsion,
                });
            }
        }
        out.sort();
        out
    }
}

/// Rank of an integer matrix (over Q), via exact rational elimination.
pub(crate) fn int_rank(m: &SparseMatrix<Int>) -> usize {
    to_rational(m).rank()
}

pub(crate) fn to_rational(m: &SparseMatrix<Int>) -> SparseMatrix<super::ring::Rat> {
    let mut out = SparseMatrix::zero(m.nrows(), m.ncols());
    for (i, row) in m.rows().enumerate() {
        for (j, v) in row {
            out.set(i, *j, super::ring::Rat::from_integer(v.clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::ring::Rat;
    use super::*;

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    #[test]
    fn zero_differential_single_generator() {
        let c = GradedChainComplex::<Rat>::new(
            0,
            vec![vec![1]],
            vec![SparseMatrix::zero(0, 1)],
        )
        .unwrap();
        let h = c.homology();
        assert_eq!(h.cells.len(), 1);
        assert_eq!(h.cell(0, 1).unwrap().free_rank, 1);
    }

    #[test]
    fn multiplication_by_two_gives_torsion() {
        // 0 -> Z --2--> Z -> 0 concentrated in quantum degree 0.
        let mut d = SparseMatrix::zero(1, 1);
        d.set(0, 0, int(2));
        let c = GradedChainComplex::<Int>::new(
            0,
            vec![vec![0], vec![0]],
            vec![d, SparseMatrix::zero(0, 1)],
        )
        .unwrap();
        let h = c.homology_integral();
        assert_eq!(h.cells.len(), 1);
        let cell = h.cell(1, 0).unwrap();
        assert_eq!(cell.free_rank, 0);
        assert_eq!(cell.torsion, vec![2]);
    }

    #[test]
    fn d_squared_nonzero_is_rejected() {
        let mut d0 = SparseMatrix::zero(1, 1);
        d0.set(0, 0, Rat::from_i64(1));
        let mut d1 = SparseMatrix::zero(1, 1);
        d1.set(0, 0, Rat::from_i64(1));
        let err = GradedChainComplex::<Rat>::new(
            0,
            vec![vec![0], vec![0], vec![0]],
            vec![d0, d1, SparseMatrix::zero(0, 1)],
        )
        .unwrap_err();
        assert!(matches!(err, ComplexError::NotAChainComplex { .. }));
    }

    #[test]
    fn grading_violation_is_rejected() {
        let mut d = SparseMatrix::zero(1, 1);
        d.set(0, 0, Rat::from_i64(1));
        let err = GradedChainComplex::<Rat>::new(
            0,
            vec![vec![0], vec![1]],
            vec![d, SparseMatrix::zero(0, 1)],
        )
        .unwrap_err();
        assert!(matches!(err, ComplexError::GradingViolation { .. }));
    }

    #[test]
    fn filtered_rejects_negative_jump() {
        let mut d = SparseMatrix::zero(1, 1);
        d.set(0, 0, Rat::from_i64(1));
        let err = FilteredChainComplex::<Rat>::new(
            0,
            vec![vec![4], vec![0]],
            vec![d, SparseMatrix::zero(0, 1)],
            4,
        )
        .unwrap_err();
        assert!(matches!(err, ComplexError::GradingViolation { .. }));
    }

    #[test]
    fn euler_characteristic_matches_homology() {
        // Two-step complex over Q with a rank-1 differential.
        let mut d = SparseMatrix::zero(2, 2);
        d.set(0, 0, Rat::from_i64(1));
        d.set(0, 1, Rat::from_i64(-1));
        let c = GradedChainComplex::<Rat>::new(
            0,
            vec![vec![3, 3], vec![3, 3]],
            vec![d, SparseMatrix::zero(0, 2)],
        )
        .unwrap();
        let h = c.homology();
        let chain_euler: i64 = 2 - 2;
        let hom_euler: i64 = h
            .cells
            .iter()
            .map(|c| {
                let sign = if c.i % 2 == 0 { 1 } else { -1 };
                sign * c.free_rank as i64
            })
            .sum();
        assert_eq!(chain_euler, hom_euler);
    }
}
