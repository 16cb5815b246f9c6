use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::complex::FilteredChainComplex;
use super::matrix::{SparseMatrix, SparseVec};
use super::ring::FieldScalar;

/// One page of the spectral sequence of a filtered complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    /// Page index; numbering starts at 2, where E_2 is the homology of the
    /// associated graded differential.
    pub r: u32,
    /// (i, j) -> rank of E_r at that bidegree. Zero ranks are omitted.
    pub ranks: BTreeMap<(i64, i64), usize>,
    /// (i, j) -> rank of the differential d_r leaving that bidegree (toward
    /// (i + 1, j + (r - 1) * step)). Zero entries are omitted.
    pub differential_ranks: BTreeMap<(i64, i64), usize>,
}

impl Page {
    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn differential_is_zero(&self) -> bool {
        self.differential_ranks.is_empty()
    }
}

/// Pages of the spectral sequence associated to the filtration, computed
/// until stabilization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralSequence {
    pub pages: Vec<Page>,
    /// Page index at which the sequence has stabilized (E_r = E_infinity).
    pub stabilization_index: u32,
    /// 1 + number of page indices r with d_r nonzero, so a sequence that
    /// collapses immediately has one nontrivial page.
    pub nontrivial_page_count: u32,
}

impl SpectralSequence {
    pub fn infinity_page(&self) -> &Page {
        self.pages.last().expect("at least one page")
    }

    /// Total E_infinity rank at homological degree i, summed over j.
    pub fn infinity_rank_at(&self, i: i64) -> usize {
        self.infinity_page()
            .ranks
            .iter()
            .filter(|((pi, _), _)| *pi == i)
            .map(|(_, r)| r)
            .sum()
    }
}

/// Z_rho at (i, level j): cycles of the rho-step approximation, i.e. chains
/// supported on levels >= j whose differential is supported on levels
/// >= j + rho * step. Returned as spanning vectors in C_i coordinates.
fn z_space<T: FieldScalar>(
    c: &FilteredChainComplex<T>,
    i: i64,
    j: i64,
    rho: i64,
) -> Vec<SparseVec<T>> {
    let dim = c.dim(i);
    let levels = c.levels_at(i);
    let cols: Vec<usize> = (0..dim).filter(|p| levels[*p] >= j).collect();
    if cols.is_empty() {
        return Vec::new();
    }
    let target_cut = j + rho * c.step();
    let zero;
    let d = match c.diff_from(i) {
        Some(d) => d,
        None => {
            zero = SparseMatrix::zero(0, dim);
            &zero
        }
    };
    let target_levels = c.levels_at(i + 1);
    let rows: Vec<usize> = (0..d.nrows())
        .filter(|r| target_levels[*r] < target_cut)
        .collect();
    let sub = d.submatrix(&rows, &cols);
    sub.kernel_basis()
        .into_iter()
        .map(|v| v.into_iter().map(|(p, x)| (cols[p], x)).collect())
        .collect()
}

fn apply_diff<T: FieldScalar>(
    c: &FilteredChainComplex<T>,
    i: i64,
    vs: &[SparseVec<T>],
) -> Vec<SparseVec<T>> {
    let Some(d) = c.diff_from(i) else {
        return Vec::new();
    };
    vs.iter()
        .map(|v| d.apply(v))
        .filter(|v| !v.is_empty())
        .collect()
}

/// Spanning vectors of the denominator of E_rho at (i, j):
/// Z_{rho-1}(i, j + step) + d Z_{rho-1}(i - 1, j - (rho - 1) * step).
fn denominator<T: FieldScalar>(
    c: &FilteredChainComplex<T>,
    i: i64,
    j: i64,
    rho: i64,
) -> Vec<SparseVec<T>> {
    let step = c.step();
    let mut span = z_space(c, i, j + step, rho - 1);
    let incoming = z_space(c, i - 1, j - (rho - 1) * step, rho - 1);
    span.extend(apply_diff(c, i - 1, &incoming));
    span
}

/// Spectral sequence pages of a filtered complex over a field.
///
/// Pages are indexed so that E_2 is the homology of the associated graded
/// differential; d_r shifts the filtration level by (r - 1) * step and the
/// homological degree by 1. Computation proceeds until the total rank
/// equals the total rank of the homology of the underlying complex.
///
/// Since every differential entry preserves the level mod step, the complex
/// is the direct sum of its residue-class subcomplexes; pages are computed
/// per residue and merged, which keeps the level arithmetic within each
/// class where consecutive levels differ by exactly `step`.
pub fn spectral_pages<T: FieldScalar>(c: &FilteredChainComplex<T>) -> SpectralSequence {
    let step = c.step();
    let mut residues: Vec<i64> = c
        .degrees()
        .into_iter()
        .flat_map(|i| c.levels_at(i).iter().map(|j| j.rem_euclid(step)))
        .collect();
    residues.sort_unstable();
    residues.dedup();

    let parts: Vec<SpectralSequence> = residues
        .iter()
        .map(|r| spectral_pages_single(&residue_subcomplex(c, *r)))
        .collect();

    // Merge: a residue that stabilized early contributes its infinity page
    // (with no differentials) to the later pages of the union.
    let n_pages = parts.iter().map(|p| p.pages.len()).max().unwrap_or(1);
    let mut pages = Vec::with_capacity(n_pages);
    let mut nontrivial = 1u32;
    for k in 0..n_pages {
        let mut ranks = BTreeMap::new();
        let mut differential_ranks = BTreeMap::new();
        for part in &parts {
            let page = part.pages.get(k).unwrap_or_else(|| part.infinity_page());
            ranks.extend(page.ranks.clone());
            if k < part.pages.len() {
                differential_ranks.extend(page.differential_ranks.clone());
            }
        }
        if !differential_ranks.is_empty() {
            nontrivial += 1;
        }
        pages.push(Page {
            r: (k + 2) as u32,
            ranks,
            differential_ranks,
        });
    }
    let stabilization_index = pages.last().map(|p| p.r).unwrap_or(2);
    SpectralSequence {
        pages,
        stabilization_index,
        nontrivial_page_count: nontrivial,
    }
}

/// Restriction of the complex to the basis elements with level congruent to
/// `residue` mod step; a subcomplex, since differentials preserve residues.
pub(crate) fn residue_subcomplex<T: FieldScalar>(
    c: &FilteredChainComplex<T>,
    residue: i64,
) -> FilteredChainComplex<T> {
    let step = c.step();
    let degrees = c.degrees();
    let selected: Vec<Vec<usize>> = degrees
        .iter()
        .map(|i| {
            c.levels_at(*i)
                .iter()
                .enumerate()
                .filter_map(|(p, j)| (j.rem_euclid(step) == residue).then_some(p))
                .collect()
        })
        .collect();
    let levels: Vec<Vec<i64>> = degrees
        .iter()
        .zip(&selected)
        .map(|(i, sel)| sel.iter().map(|p| c.levels_at(*i)[*p]).collect())
        .collect();
    let diffs: Vec<SparseMatrix<T>> = degrees
        .iter()
        .enumerate()
        .map(|(k, i)| {
            let cols = &selected[k];
            let empty = Vec::new();
            let rows = selected.get(k + 1).unwrap_or(&empty);
            match c.diff_from(*i) {
                Some(d) => d.submatrix(rows, cols),
                None => SparseMatrix::zero(rows.len(), cols.len()),
            }
        })
        .collect();
    FilteredChainComplex::new(c.min_degree(), levels, diffs, step)
        .expect("residue restriction of a filtered complex is a filtered complex")
}

fn spectral_pages_single<T: FieldScalar>(c: &FilteredChainComplex<T>) -> SpectralSequence {
    // Total homology rank over the field, for the stabilization test.
    let mut h_total = 0usize;
    let mut h_per_degree: BTreeMap<i64, usize> = BTreeMap::new();
    for i in c.degrees() {
        let dim = c.dim(i);
        let rank_out = c.diff_from(i).map(|d| d.rank()).unwrap_or(0);
        let rank_in = c.diff_from(i - 1).map(|d| d.rank()).unwrap_or(0);
        let rank = dim - rank_out - rank_in;
        h_total += rank;
        if rank > 0 {
            h_per_degree.insert(i, rank);
        }
    }

    let mut pages = Vec::new();
    let mut nontrivial = 1u32;
    let mut rho = 1i64;
    loop {
        let r = (rho + 1) as u32;
        let mut ranks = BTreeMap::new();
        let mut diff_ranks = BTreeMap::new();
        for i in c.degrees() {
            let dim = c.dim(i);
            let mut js: Vec<i64> = c.levels_at(i).to_vec();
            js.sort_unstable();
            js.dedup();
            for j in js {
                let z = z_space(c, i, j, rho);
                let den = denominator(c, i, j, rho);
                let z_dim = SparseMatrix::span_dim(dim, &z);
                let den_dim = SparseMatrix::span_dim(dim, &den);
                let rank = z_dim - den_dim;
                if rank > 0 {
                    ranks.insert((i, j), rank);
                }

                // rank of d_rho out of (i, j): image of d on Z_rho modulo the
                // target denominator.
                let target_dim = c.dim(i + 1);
                if target_dim > 0 && !z.is_empty() {
                    let image = apply_diff(c, i, &z);
                    if !image.is_empty() {
                        let target_den = denominator(c, i + 1, j + rho * c.step(), rho);
                        let base = SparseMatrix::span_dim(target_dim, &target_den);
                        let mut joint = target_den;
                        joint.extend(image);
                        let d_rank = SparseMatrix::span_dim(target_dim, &joint) - base;
                        if d_rank > 0 {
                            diff_ranks.insert((i, j), d_rank);
                        }
                    }
                }
            }
        }
        let total: usize = ranks.values().sum();
        let diff_nonzero = !diff_ranks.is_empty();
        if diff_nonzero {
            nontrivial += 1;
        }
        pages.push(Page {
            r,
            ranks,
            differential_ranks: diff_ranks,
        });
        if total == h_total && !diff_nonzero {
            break;
        }
        // All filtrations here are finite, so stabilization is guaranteed;
        // the bound below is a safety net against construction bugs.
        assert!(rho < 2 * (c.total_dim() as i64 + 4), "spectral sequence failed to stabilize");
        rho += 1;
    }

    let stabilization_index = pages.last().unwrap().r;
    let ss = SpectralSequence {
        pages,
        stabilization_index,
        nontrivial_page_count: nontrivial,
    };
    // Convergence: total E_infinity rank per degree matches homology.
    for (i, rank) in &h_per_degree {
        debug_assert_eq!(ss.infinity_rank_at(*i), *rank);
    }
    ss
}

#[cfg(test)]
mod tests {
    use super::super::ring::{Rat, Scalar};
    use super::*;

    fn rat(v: i64) -> Rat {
        Rat::from_i64(v)
    }

    #[test]
    fn unfiltered_complex_collapses_immediately() {
        // d of pure filtration degree 0: E_2 = E_infinity.
        let mut d = SparseMatrix::zero(1, 1);
        d.set(0, 0, rat(1));
        let c = FilteredChainComplex::<Rat>::new(
            0,
            vec![vec![0], vec![0]],
            vec![d, SparseMatrix::zero(0, 1)],
            4,
        )
        .unwrap();
        let ss = spectral_pages(&c);
        assert_eq!(ss.nontrivial_page_count, 1);
        assert_eq!(ss.pages[0].total_rank(), 0);
    }

    #[test]
    fn pure_step_differential_gives_two_pages() {
        // Two generators, d of pure degree `step`: E_2 has rank 2, d_2 kills
        // everything, E_3 = 0.
        let mut d = SparseMatrix::zero(1, 1);
        d.set(0, 0, rat(1));
        let c = FilteredChainComplex::<Rat>::new(
            0,
            vec![vec![0], vec![4]],
            vec![d, SparseMatrix::zero(0, 1)],
            4,
        )
        .unwrap();
        let ss = spectral_pages(&c);
        assert_eq!(ss.pages[0].total_rank(), 2);
        assert!(!ss.pages[0].differential_is_zero());
        assert_eq!(ss.nontrivial_page_count, 2);
        assert_eq!(ss.infinity_page().total_rank(), 0);
    }

    #[test]
    fn longer_differential_survives_more_pages() {
        // d jumps two steps: d_2 = 0, d_3 kills; three pages, two nontrivial.
        let mut d = SparseMatrix::zero(1, 1);
        d.set(0, 0, rat(1));
        let c = FilteredChainComplex::<Rat>::new(
            0,
            vec![vec![0], vec![8]],
            vec![d, SparseMatrix::zero(0, 1)],
            4,
        )
        .unwrap();
        let ss = spectral_pages(&c);
        assert_eq!(ss.pages[0].total_rank(), 2);
        assert!(ss.pages[0].differential_is_zero());
        assert!(!ss.pages[1].differential_is_zero());
        assert_eq!(ss.nontrivial_page_count, 2);
        assert_eq!(ss.stabilization_index, 4);
        assert_eq!(ss.infinity_page().total_rank(), 0);
    }

    #[test]
    fn infinity_ranks_sum_to_homology() {
        // Mixed-degree differential with a surviving class.
        let mut d = SparseMatrix::zero(2, 2);
        d.set(0, 0, rat(1));
        d.set(1, 1, rat(0));
        d.set(0, 1, rat(1));
        let c = FilteredChainComplex::<Rat>::new(
            0,
            vec![vec![0, 4], vec![4, 8]],
            vec![d, SparseMatrix::zero(0, 2)],
            4,
        )
        .unwrap();
        let ss = spectral_pages(&c);
        // Underlying homology: d has rank 1, so h_0 = 1, h_1 = 1.
        assert_eq!(ss.infinity_rank_at(0), 1);
        assert_eq!(ss.infinity_rank_at(1), 1);
    }
}
