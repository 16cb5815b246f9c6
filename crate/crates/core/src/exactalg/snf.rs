use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::SparseMatrix;
use super::ring::Int;

/// Smith normal form U * M * V = D with U, V unimodular and the diagonal of
/// D a divisibility chain d1 | d2 | ... with nonnegative entries.
#[derive(Debug, Clone)]
pub struct SmithNormalForm {
    pub u: SparseMatrix<Int>,
    pub d: SparseMatrix<Int>,
    pub v: SparseMatrix<Int>,
    /// Diagonal entries of D that are nonzero.
    pub invariant_factors: Vec<Int>,
}

impl SmithNormalForm {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Invariant factors greater than 1, the torsion coefficients of the
    /// cokernel.
    pub fn torsion(&self) -> Vec<Int> {
        self.invariant_factors
            .iter()
            .filter(|f| **f > BigInt::one())
            .cloned()
            .collect()
    }
}

struct Work {
    m: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    nrows: usize,
    ncols: usize,
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            self.m.swap(a, b);
            self.u.swap(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for row in &mut self.m {
            row.swap(a, b);
        }
        for row in &mut self.v {
            row.swap(a, b);
        }
    }

    /// row[a] += c * row[b]
    fn add_row(&mut self, a: usize, b: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.ncols {
            let t = &self.m[b][j] * c;
            self.m[a][j] += t;
        }
        for j in 0..self.nrows {
            let t = &self.u[b][j] * c;
            self.u[a][j] += t;
        }
    }

    /// col[a] += c * col[b]
    fn add_col(&mut self, a: usize, b: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for row in &mut self.m {
            let t = &row[b] * c;
            row[a] += t;
        }
        for row in &mut self.v {
            let t = &row[b] * c;
            row[a] += t;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.ncols {
            let t = -std::mem::take(&mut self.m[a][j]);
            self.m[a][j] = t;
        }
        for j in 0..self.nrows {
            let t = -std::mem::take(&mut self.u[a][j]);
            self.u[a][j] = t;
        }
    }

    /// Smallest nonzero |entry| in the block starting at (k, k); ties break
    /// on the lowest row, then the lowest column.
    fn pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in k..self.nrows {
            for j in k..self.ncols {
                let e = &self.m[i][j];
                if e.is_zero() {
                    continue;
                }
                let a = e.abs();
                match &best {
                    Some((_, _, cur)) if *cur <= a => {}
                    _ => best = Some((i, j, a)),
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

/// Computes the Smith normal form of an integer matrix.
///
/// Pivoting is by minimal absolute value with deterministic tie-breaking, so
/// U and V are reproducible.
pub fn smith_normal_form(m: &SparseMatrix<Int>) -> SmithNormalForm {
    let nrows = m.nrows();
    let ncols = m.ncols();
    let mut w = Work {
        m: (0..nrows)
            .map(|i| (0..ncols).map(|j| m.get(i, j)).collect())
            .collect(),
        u: (0..nrows)
            .map(|i| {
                (0..nrows)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect(),
        v: (0..ncols)
            .map(|i| {
                (0..ncols)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect(),
        nrows,
        ncols,
    };

    let bound = nrows.min(ncols);
    let mut k = 0;
    'stage: while k < bound {
        let Some((pi, pj)) = w.pivot(k) else { break };
        w.swap_rows(k, pi);
        w.swap_cols(k, pj);

        // One Euclidean step per pass: a remainder strictly smaller than
        // the pivot appears and the stage restarts with a global re-pivot,
        // so pivots shrink geometrically and entries stay tame.
        for i in (k + 1)..nrows {
            if !(&w.m[i][k] % &w.m[k][k]).is_zero() {
                let q = div_nearest(&w.m[i][k], &w.m[k][k]);
                w.add_row(i, k, &(-q));
                continue 'stage;
            }
        }
        for j in (k + 1)..ncols {
            if !(&w.m[k][j] % &w.m[k][k]).is_zero() {
                let q = div_nearest(&w.m[k][j], &w.m[k][k]);
                w.add_col(j, k, &(-q));
                continue 'stage;
            }
        }

        // The pivot divides its row and column: clear them exactly.
        for i in (k + 1)..nrows {
            if !w.m[i][k].is_zero() {
                let q = &w.m[i][k] / &w.m[k][k];
                w.add_row(i, k, &(-q));
            }
        }
        for j in (k + 1)..ncols {
            if !w.m[k][j].is_zero() {
                let q = &w.m[k][j] / &w.m[k][k];
                w.add_col(j, k, &(-q));
            }
        }

        // Absorb one entry the pivot does not divide, then redo the stage.
        for i in (k + 1)..nrows {
            for j in (k + 1)..ncols {
                if !(&w.m[i][j] % &w.m[k][k]).is_zero() {
                    w.add_row(k, i, &BigInt::one());
                    continue 'stage;
                }
            }
        }

        if w.m[k][k].is_negative() {
            w.negate_row(k);
        }
        k += 1;
    }

    let mut factors = Vec::new();
    for i in 0..bound {
        if w.m[i][i].is_zero() {
            break;
        }
        factors.push(w.m[i][i].clone());
    }

    let to_sparse = |rows: &Vec<Vec<BigInt>>, nr: usize, nc: usize| {
        let mut s = SparseMatrix::zero(nr, nc);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    s.set(i, j, v.clone());
                }
            }
        }
        s
    };

    SmithNormalForm {
        u: to_sparse(&w.u, nrows, nrows),
        d: to_sparse(&w.m, nrows, ncols),
        v: to_sparse(&w.v, ncols, ncols),
        invariant_factors: factors,
    }
}

/// Quotient rounded to nearest, which keeps remainders at most |d|/2.
fn div_nearest(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_rem(d);
    let two_r = r.abs() * 2;
    if two_r > d.abs() {
        if (r.is_negative()) == (d.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn from_dense(rows: &[&[i64]]) -> SparseMatrix<Int> {
        let nr = rows.len();
        let nc = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut m = SparseMatrix::zero(nr, nc);
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, BigInt::from(*v));
            }
        }
        m
    }

    fn dense(m: &SparseMatrix<Int>) -> Vec<Vec<BigInt>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m.get(i, j)).collect())
            .collect()
    }

    /// Determinant by fraction-free Bareiss elimination; test-only oracle.
    fn det(m: &SparseMatrix<Int>) -> BigInt {
        let n = m.nrows();
        assert_eq!(n, m.ncols());
        let mut a = dense(m);
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|i| !a[*i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, swap);
                sign = -sign;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let t = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = t;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    /// Naive gcd-elimination Smith form, independent of the main routine:
    /// no transform tracking, simplest possible pivoting, final pairwise
    /// divisibility fix-up on the diagonal.
    fn invariant_factors_oracle(m: &SparseMatrix<Int>) -> Vec<BigInt> {
        let mut a = dense(m);
        let nr = a.len();
        let nc = if nr == 0 { 0 } else { a[0].len() };
        let mut diag: Vec<BigInt> = Vec::new();
        let mut k = 0;
        while k < nr.min(nc) {
            // Any nonzero entry will do as a starting pivot.
            let mut found = None;
            for i in k..nr {
                for j in k..nc {
                    if !a[i][j].is_zero() {
                        found = Some((i, j));
                        break;
                    }
                }
                if found.is_some() {
                    break;
                }
            }
            let Some((pi, pj)) = found else { break };
            a.swap(k, pi);
            for row in &mut a {
                row.swap(k, pj);
            }
            loop {
                let mut changed = false;
                for i in (k + 1)..nr {
                    while !a[i][k].is_zero() {
                        let q = &a[i][k] / &a[k][k];
                        for j in 0..nc {
                            let t = &a[k][j] * &q;
                            a[i][j] -= t;
                        }
                        if !a[i][k].is_zero() {
                            a.swap(k, i);
                            changed = true;
                        }
                    }
                }
                for j in (k + 1)..nc {
                    while !a[k][j].is_zero() {
                        let q = &a[k][j] / &a[k][k];
                        for i in 0..nr {
                            let t = &a[i][k] * &q;
                            a[i][j] -= t;
                        }
                        if !a[k][j].is_zero() {
                            for row in &mut a {
                                row.swap(k, j);
                            }
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            diag.push(a[k][k].abs());
            k += 1;
        }
        diag.retain(|d| !d.is_zero());
        // Pairwise gcd/lcm sweep until the chain divides.
        loop {
            let mut settled = true;
            for i in 0..diag.len().saturating_sub(1) {
                for j in (i + 1)..diag.len() {
                    if !(&diag[j] % &diag[i]).is_zero() {
                        let g = diag[i].gcd(&diag[j]);
                        let l = diag[i].lcm(&diag[j]);
                        diag[i] = g;
                        diag[j] = l;
                        settled = false;
                    }
                }
            }
            if settled {
                break;
            }
        }
        diag
    }

    #[test]
    fn identity_is_fixed() {
        let m = SparseMatrix::<Int>::identity(4);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.invariant_factors, vec![BigInt::one(); 4]);
        assert_eq!(snf.d, m);
    }

    #[test]
    fn single_entry() {
        let m = from_dense(&[&[2]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.invariant_factors, vec![BigInt::from(2)]);
    }

    #[test]
    fn worked_example_matches_minor_gcds() {
        // For [[2,4,4],[-6,6,12],[10,-4,-16]]: gcd of entries 2, gcd of 2x2
        // minors 12, |det| 144, so the invariant factors are 2, 6, 12.
        let m = from_dense(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let snf = smith_normal_form(&m);
        assert_eq!(
            snf.invariant_factors,
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
    }

    #[test]
    fn randomized_against_oracle_with_unimodular_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_817);
        for _ in 0..60 {
            let nr = rng.random_range(1..=5);
            let nc = rng.random_range(1..=5);
            let mut m = SparseMatrix::<Int>::zero(nr, nc);
            for i in 0..nr {
                for j in 0..nc {
                    m.set(i, j, BigInt::from(rng.random_range(-9..=9i64)));
                }
            }
            let snf = smith_normal_form(&m);

            let umv = snf.u.matmul(&m).matmul(&snf.v);
            assert_eq!(umv, snf.d, "U*M*V must equal D");
            for i in 1..snf.invariant_factors.len() {
                assert!(
                    (&snf.invariant_factors[i] % &snf.invariant_factors[i - 1]).is_zero(),
                    "divisibility chain"
                );
            }
            assert_eq!(det(&snf.u).abs(), BigInt::one(), "U unimodular");
            assert_eq!(det(&snf.v).abs(), BigInt::one(), "V unimodular");
            assert_eq!(
                snf.invariant_factors,
                invariant_factors_oracle(&m),
                "invariant factors agree with gcd-elimination oracle"
            );
        }
    }
}
