//! Classical Khovanov and Lee theory of local diagrams, used as an
//! independent oracle: a single-sheet assembly over the same cube, which
//! for a local diagram can have no Möbius edges.

use super::{TheoryError, TheoryTag};
use crate::cube::{build_cube, Cube, EdgeKind};
use crate::diagram::ProjectiveDiagram;
use crate::exactalg::{
    filtered_homology, FilteredChainComplex, GradedChainComplex, HomologySummary, Int, Mod2, Rat,
    RingTag, Scalar, SparseMatrix,
};

/// Index layout for single-sheet chain spaces: one block of 2^circles
/// label vectors per vertex, vertices ascending by mask within a degree.
struct ClassicalLayout {
    min_degree: i64,
    writhe: i64,
    vertices: Vec<Vec<u32>>,
    deg_index_of_mask: Vec<usize>,
    offset_of_mask: Vec<usize>,
    circles_of_mask: Vec<usize>,
    dims: Vec<usize>,
}

impl ClassicalLayout {
    fn from_cube(cube: &Cube, writhe: i64) -> Self {
        let min_degree = cube.vertices.iter().map(|s| s.height).min().unwrap_or(0);
        let max_degree = cube.vertices.iter().map(|s| s.height).max().unwrap_or(0);
        let n_deg = (max_degree - min_degree + 1) as usize;
        let mut vertices: Vec<Vec<u32>> = vec![Vec::new(); n_deg];
        for s in &cube.vertices {
            vertices[(s.height - min_degree) as usize].push(s.index.bits());
        }
        for v in &mut vertices {
            v.sort_unstable();
        }
        let n_masks = cube.vertices.len();
        let mut deg_index_of_mask = vec![0usize; n_masks];
        let mut offset_of_mask = vec![0usize; n_masks];
        let mut circles_of_mask = vec![0usize; n_masks];
        for s in &cube.vertices {
            circles_of_mask[s.index.bits() as usize] = s.circle_count();
        }
        let mut dims = vec![0usize; n_deg];
        for (di, masks) in vertices.iter().enumerate() {
            let mut offset = 0;
            for &m in masks {
                deg_index_of_mask[m as usize] = di;
                offset_of_mask[m as usize] = offset;
                offset += 1usize << circles_of_mask[m as usize];
            }
            dims[di] = offset;
        }
        ClassicalLayout {
            min_degree,
            writhe,
            vertices,
            deg_index_of_mask,
            offset_of_mask,
            circles_of_mask,
            dims,
        }
    }

    fn index(&self, mask: u32, labels: u32) -> usize {
        self.offset_of_mask[mask as usize] + labels as usize
    }

    fn j(&self, mask: u32, labels: u32) -> i64 {
        let m = self.circles_of_mask[mask as usize] as i64;
        let p = m - 2 * labels.count_ones() as i64;
        let height = self.min_degree + self.deg_index_of_mask[mask as usize] as i64;
        p + height + self.writhe
    }
}

fn assemble_classical<T: Scalar>(
    d: &ProjectiveDiagram,
    lee: bool,
) -> Result<(i64, Vec<Vec<i64>>, Vec<SparseMatrix<T>>), TheoryError> {
    if !d.is_local() {
        return Err(TheoryError::NotLocal);
    }
    let cube = build_cube(d)?;
    let layout = ClassicalLayout::from_cube(&cube, d.writhe());
    let tables = super::theory_tables(if lee {
        TheoryTag::DoubledLee
    } else {
        TheoryTag::DoubledKhovanov
    });

    let n_deg = layout.vertices.len();
    let mut gradings: Vec<Vec<i64>> = Vec::with_capacity(n_deg);
    for k in 0..n_deg {
        let mut js = vec![0i64; layout.dims[k]];
        for &mask in &layout.vertices[k] {
            let m = layout.circles_of_mask[mask as usize];
            for labels in 0..1u32 << m {
                js[layout.index(mask, labels)] = layout.j(mask, labels);
            }
        }
        gradings.push(js);
    }

    let mut diffs: Vec<SparseMatrix<T>> = (0..n_deg)
        .map(|k| {
            let rows = if k + 1 < n_deg { layout.dims[k + 1] } else { 0 };
            SparseMatrix::zero(rows, layout.dims[k])
        })
        .collect();
    for edge in &cube.edges {
        let from = cube.vertex(edge.from);
        let to = cube.vertex(edge.to);
        let k = (from.height - layout.min_degree) as usize;
        let label = |labels: u32, pos: usize| labels >> pos & 1 == 1;
        let carry = |labels: u32, skip: &[usize], fill: &mut u32| {
            for (pos, c) in from.circles.iter().enumerate() {
                if skip.contains(&c.id) {
                    continue;
                }
                let tpos = to.circle_position(c.id).unwrap();
                if label(labels, pos) {
                    *fill |= 1 << tpos;
                }
            }
        };
        let m = from.circle_count();
        for labels in 0..1u32 << m {
            let col = layout.index(from.index.bits(), labels);
            match edge.kind {
                EdgeKind::Merge { a, b, into } => {
                    let pa = from.circle_position(a).unwrap();
                    let pb = from.circle_position(b).unwrap();
                    let pt = to.circle_position(into).unwrap();
                    for (tl, coeff) in (tables.merge)(label(labels, pa), label(labels, pb)) {
                        let mut tl_bits = 0u32;
                        carry(labels, &[a, b], &mut tl_bits);
                        if *tl {
                            tl_bits |= 1 << pt;
                        }
                        diffs[k].add_entry(
                            layout.index(to.index.bits(), tl_bits),
                            col,
                            T::from_i64(coeff * edge.sign as i64),
                        );
                    }
                }
                EdgeKind::Split { from: f, a, b } => {
                    let pf = from.circle_position(f).unwrap();
                    let pa = to.circle_position(a).unwrap();
                    let pb = to.circle_position(b).unwrap();
                    for ((la, lb), coeff) in (tables.split)(label(labels, pf)) {
                        let mut tl_bits = 0u32;
                        carry(labels, &[f], &mut tl_bits);
                        if *la {
                            tl_bits |= 1 << pa;
                        }
                        if *lb {
                            tl_bits |= 1 << pb;
                        }
                        diffs[k].add_entry(
                            layout.index(to.index.bits(), tl_bits),
                            col,
                            T::from_i64(coeff * edge.sign as i64),
                        );
                    }
                }
                EdgeKind::Eta { .. } => unreachable!("local diagrams have no Möbius edges"),
            }
        }
    }
    Ok((layout.min_degree, gradings, diffs))
}

/// Classical Khovanov complex of a local diagram.
pub fn build_classical_kh<T: Scalar>(
    d: &ProjectiveDiagram,
) -> Result<GradedChainComplex<T>, TheoryError> {
    let (min, gradings, diffs) = assemble_classical::<T>(d, false)?;
    Ok(GradedChainComplex::new(min, gradings, diffs)?)
}

/// Classical Lee complex of a local diagram over Q (filtration step 4).
pub fn build_classical_lee(
    d: &ProjectiveDiagram,
) -> Result<FilteredChainComplex<Rat>, TheoryError> {
    let (min, gradings, diffs) = assemble_classical::<Rat>(d, true)?;
    Ok(FilteredChainComplex::new(min, gradings, diffs, 4)?)
}

/// Classical Khovanov homology grid of a local diagram.
pub fn classical_khovanov(
    d: &ProjectiveDiagram,
    ring: RingTag,
) -> Result<HomologySummary, TheoryError> {
    Ok(match ring {
        RingTag::Integers => build_classical_kh::<Int>(d)?.homology_integral(),
        RingTag::Rationals => build_classical_kh::<Rat>(d)?.homology(),
        RingTag::Mod2 => build_classical_kh::<Mod2>(d)?.homology(),
    })
}

/// Classical Rasmussen invariant of a local knot via Lee theory: the
/// s-support is {s+1, s-1}, and the invariant is its maximum minus 1.
pub fn classical_s_invariant(d: &ProjectiveDiagram) -> Result<i64, TheoryError> {
    let components = d.components().len();
    if components != 1 {
        return Err(TheoryError::NotAKnot { components });
    }
    let c = build_classical_lee(d)?;
    let h = filtered_homology(&c);
    let support = h.s_support();
    if support.len() != 2 || support[1] - support[0] != 2 || h.total_rank() != 2 {
        return Err(TheoryError::BadQuantumSupport { support });
    }
    Ok(support[1] - 1)
}
