use super::*;
use crate::colouring::enumerate_two_colourings;
use crate::diagram::parse_diagram;
use crate::exactalg::{filtration_grading, FieldScalar, SparseVec};

const KINK_POS: &str = "crossing x o:h o:t l:t l:h\n";
const KINK_NEG: &str = "crossing x o:h l:h l:t o:t\n";
const ETA_ONE: &str = "\
crossing x a1:h b2:t a2:t b1:h
boundary a1:t b2:h a2:h b1:t
";
pub(crate) const TREFOIL_RIGHT: &str = "\
crossing c1 b3:h b1:t a1:t a3:h
crossing c2 b1:h b2:t a2:t a1:h
crossing c3 b2:h b3:t a3:t a2:h
";
pub(crate) const TREFOIL_LEFT: &str = "\
crossing c1 a3:h b3:h b1:t a1:t
crossing c2 a1:h b1:h b2:t a2:t
crossing c3 a2:h b2:h b3:t a3:t
";
pub(crate) const HOPF_POS: &str = "\
crossing c1 b2:h b1:t a1:t a2:h
crossing c2 b1:h b2:t a2:t a1:h
";
pub(crate) const HOPF_NEG: &str = "\
crossing c1 a2:h b2:h b1:t a1:t
crossing c2 a1:h b1:h b2:t a2:t
";

fn grid(h: &HomologySummary) -> Vec<(i64, i64, usize, Vec<i64>)> {
    h.cells
        .iter()
        .map(|c| (c.i, c.j, c.free_rank, c.torsion.clone()))
        .collect()
}

#[test]
fn unknot_dkh_over_q() {
    let d = parse_diagram("unknot 1\n").unwrap();
    let h = dkh_homology(&d, RingTag::Rationals).unwrap();
    assert_eq!(
        grid(&h),
        vec![
            (0, -2, 1, vec![]),
            (0, -1, 1, vec![]),
            (0, 0, 1, vec![]),
            (0, 1, 1, vec![]),
        ]
    );
}

#[test]
fn essential_circle_dkh_matches_unknot() {
    let u = parse_diagram("unknot 1\n").unwrap();
    let e = parse_diagram("boundary a:t a:h\n").unwrap();
    assert_eq!(
        dkh_homology(&u, RingTag::Rationals).unwrap(),
        dkh_homology(&e, RingTag::Rationals).unwrap()
    );
}

#[test]
fn kink_diagrams_match_unknot_after_r1() {
    let u = parse_diagram("unknot 1\n").unwrap();
    let expect = dkh_homology(&u, RingTag::Rationals).unwrap();
    for text in [KINK_POS, KINK_NEG] {
        let d = parse_diagram(text).unwrap();
        assert_eq!(dkh_homology(&d, RingTag::Rationals).unwrap(), expect);
        assert_eq!(
            dkh_homology(&d, RingTag::Integers).unwrap(),
            dkh_homology(&u, RingTag::Integers).unwrap()
        );
    }
}

#[test]
fn degenerate_link_grids() {
    // One crossing between the strands of a doubled essential curve. The
    // only differential is eta: over Q the homology is one class at
    // (0, -1) and one at (1, 3); over Z the eta coefficient 2 leaves
    // torsion at (1, 1).
    let d = parse_diagram(ETA_ONE).unwrap();
    let q = dkh_homology(&d, RingTag::Rationals).unwrap();
    assert_eq!(
        grid(&q),
        vec![(0, -1, 1, vec![]), (1, 3, 1, vec![])]
    );
    let z = dkh_homology(&d, RingTag::Integers).unwrap();
    assert_eq!(
        grid(&z),
        vec![
            (0, -1, 1, vec![]),
            (1, 1, 0, vec![2]),
            (1, 3, 1, vec![]),
        ]
    );
    // Degenerate component: both filtered theories vanish.
    assert_eq!(lee_homology(&d).unwrap().total_rank(), 0);
    assert_eq!(bn_homology(&d).unwrap().total_rank(), 0);
}

#[test]
fn eta_tables_on_one_strand() {
    // Build the eta edge of the wall-twist diagram and apply each theory's
    // block to single-circle generators.
    let d = parse_diagram(ETA_ONE).unwrap();
    let cube = crate::cube::build_cube(&d).unwrap();
    let edge = &cube.edges[0];
    let from = cube.vertex(edge.from);
    let to = cube.vertex(edge.to);
    let apply = |theory: TheoryTag, sheet: Sheet, labels: u32| {
        let tables = theory_tables(theory);
        edge_block_on_generator(
            from,
            to,
            edge,
            &tables,
            &DoubledGenerator {
                vertex: edge.from,
                labels,
                sheet,
            },
        )
    };
    // eta(v+^u) = v+^l
    let out = apply(TheoryTag::DoubledKhovanov, Sheet::Upper, 0);
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].0.sheet, Sheet::Lower);
    assert_eq!(out[0].0.labels, 0);
    assert_eq!(out[0].1, 1);
    // eta(v+^l) = 2 v-^u
    let out = apply(TheoryTag::DoubledKhovanov, Sheet::Lower, 0);
    assert_eq!(out.len(), 1);
    assert_eq!((out[0].0.sheet, out[0].0.labels, out[0].1), (Sheet::Upper, 1, 2));
    // eta(v-^l) = 0 for doubled Khovanov, 2 v+^u for doubled Lee.
    assert!(apply(TheoryTag::DoubledKhovanov, Sheet::Lower, 1).is_empty());
    let out = apply(TheoryTag::DoubledLee, Sheet::Lower, 1);
    assert_eq!((out[0].0.sheet, out[0].0.labels, out[0].1), (Sheet::Upper, 0, 2));
    // eta_2 swaps the sheet and fixes labels.
    let out = apply(TheoryTag::DoubledBarNatan, Sheet::Lower, 0);
    assert_eq!((out[0].0.sheet, out[0].0.labels, out[0].1), (Sheet::Upper, 0, 1));
}

#[test]
fn eta_fixes_bystander_labels() {
    // Same wall-twist crossing with a free unknot alongside: the eta block
    // toggles the sheet, keeps the bystander label, coefficient 1.
    let d = parse_diagram(&format!("{ETA_ONE}unknot 1\n")).unwrap();
    let cube = crate::cube::build_cube(&d).unwrap();
    let edge = &cube.edges[0];
    let from = cube.vertex(edge.from);
    let to = cube.vertex(edge.to);
    assert_eq!(from.circle_count(), 2);
    let tables = theory_tables(TheoryTag::DoubledKhovanov);
    let out = edge_block_on_generator(
        from,
        to,
        edge,
        &tables,
        &DoubledGenerator {
            vertex: edge.from,
            labels: 0b00,
            sheet: Sheet::Upper,
        },
    );
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].0.sheet, Sheet::Lower);
    assert_eq!(out[0].0.labels, 0b00);
    assert_eq!(out[0].1, 1);
}

#[test]
fn merge_sends_mixed_labels_to_minus_in_both_sheets() {
    let d = parse_diagram(KINK_POS).unwrap();
    let cube = crate::cube::build_cube(&d).unwrap();
    let edge = &cube.edges[0];
    let from = cube.vertex(edge.from);
    let to = cube.vertex(edge.to);
    assert!(matches!(edge.kind, crate::cube::EdgeKind::Merge { .. }));
    let tables = theory_tables(TheoryTag::DoubledKhovanov);
    for sheet in [Sheet::Upper, Sheet::Lower] {
        for labels in [0b01u32, 0b10u32] {
            let out = edge_block_on_generator(
                from,
                to,
                edge,
                &tables,
                &DoubledGenerator {
                    vertex: edge.from,
                    labels,
                    sheet,
                },
            );
            assert_eq!(out.len(), 1);
            assert_eq!(out[0].0.labels, 1);
            assert_eq!(out[0].0.sheet, sheet);
            assert_eq!(out[0].1, 1);
        }
    }
}

#[test]
fn unknot_lee_and_bn() {
    let d = parse_diagram("unknot 1\n").unwrap();
    let lee = lee_homology(&d).unwrap();
    assert_eq!(lee.total_rank(), 4);
    assert_eq!(lee.degree_support(), vec![0]);
    assert_eq!(lee.s_support(), vec![-2, -1, 0, 1]);
    let bn = bn_homology(&d).unwrap();
    assert_eq!(bn.total_rank(), 4);
    assert_eq!(bn.s_support(), vec![-2, -1, 0, 1]);
    assert_eq!(rasmussen(&d, RingTag::Rationals).unwrap(), 0);
    assert_eq!(rasmussen(&d, RingTag::Mod2).unwrap(), 0);
}

#[test]
fn kink_rasmussen_is_zero() {
    for text in [KINK_POS, KINK_NEG] {
        let d = parse_diagram(text).unwrap();
        assert_eq!(rasmussen(&d, RingTag::Rationals).unwrap(), 0, "{text}");
        assert_eq!(rasmussen(&d, RingTag::Mod2).unwrap(), 0, "{text}");
    }
}

#[test]
fn rasmussen_rejects_links() {
    let d = parse_diagram("unknot 2\n").unwrap();
    assert!(matches!(
        rasmussen(&d, RingTag::Rationals),
        Err(TheoryError::NotAKnot { components: 2 })
    ));
}

#[test]
fn classical_trefoil_grids() {
    let d = parse_diagram(TREFOIL_RIGHT).unwrap();
    assert_eq!(d.writhe(), 3);
    assert_eq!(d.components().len(), 1);
    let q = classical_khovanov(&d, RingTag::Rationals).unwrap();
    assert_eq!(
        grid(&q),
        vec![
            (0, 1, 1, vec![]),
            (0, 3, 1, vec![]),
            (2, 5, 1, vec![]),
            (3, 9, 1, vec![]),
        ]
    );
    let z = classical_khovanov(&d, RingTag::Integers).unwrap();
    assert_eq!(
        grid(&z),
        vec![
            (0, 1, 1, vec![]),
            (0, 3, 1, vec![]),
            (2, 5, 1, vec![]),
            (3, 7, 0, vec![2]),
            (3, 9, 1, vec![]),
        ]
    );

    let m = parse_diagram(TREFOIL_LEFT).unwrap();
    assert_eq!(m.writhe(), -3);
    let zm = classical_khovanov(&m, RingTag::Integers).unwrap();
    assert_eq!(
        grid(&zm),
        vec![
            (-3, -9, 1, vec![]),
            (-2, -7, 0, vec![2]),
            (-2, -5, 1, vec![]),
            (0, -3, 1, vec![]),
            (0, -1, 1, vec![]),
        ]
    );
}

#[test]
fn classical_hopf_grids() {
    let d = parse_diagram(HOPF_POS).unwrap();
    assert_eq!(d.writhe(), 2);
    assert_eq!(d.components().len(), 2);
    let q = classical_khovanov(&d, RingTag::Rationals).unwrap();
    assert_eq!(
        grid(&q),
        vec![
            (0, 0, 1, vec![]),
            (0, 2, 1, vec![]),
            (2, 4, 1, vec![]),
            (2, 6, 1, vec![]),
        ]
    );
}

#[test]
fn classical_s_of_trefoils() {
    let r = parse_diagram(TREFOIL_RIGHT).unwrap();
    let l = parse_diagram(TREFOIL_LEFT).unwrap();
    assert_eq!(classical_s_invariant(&r).unwrap(), 2);
    assert_eq!(classical_s_invariant(&l).unwrap(), -2);
}

#[test]
fn local_diagrams_split_as_two_classical_copies() {
    for text in [KINK_POS, KINK_NEG, TREFOIL_RIGHT, TREFOIL_LEFT, HOPF_POS, HOPF_NEG] {
        let d = parse_diagram(text).unwrap();
        for ring in [RingTag::Rationals, RingTag::Mod2] {
            let doubled = dkh_homology(&d, ring).unwrap();
            let classical = classical_khovanov(&d, ring).unwrap();
            let rank = |h: &HomologySummary, i: i64, j: i64| {
                h.cell(i, j).map(|c| c.free_rank).unwrap_or(0)
            };
            let mut bidegrees: Vec<(i64, i64)> = doubled
                .cells
                .iter()
                .map(|c| (c.i, c.j))
                .chain(classical.cells.iter().map(|c| (c.i, c.j)))
                .chain(classical.cells.iter().map(|c| (c.i, c.j - 1)))
                .collect();
            bidegrees.sort_unstable();
            bidegrees.dedup();
            for (i, j) in bidegrees {
                assert_eq!(
                    rank(&doubled, i, j),
                    rank(&classical, i, j) + rank(&classical, i, j + 1),
                    "{text} ring {ring} at ({i},{j})"
                );
            }
        }
    }
}

#[test]
fn doubled_rasmussen_of_local_trefoils_is_classical() {
    for (text, expect) in [(TREFOIL_RIGHT, 2i64), (TREFOIL_LEFT, -2i64)] {
        let d = parse_diagram(text).unwrap();
        assert_eq!(rasmussen(&d, RingTag::Rationals).unwrap(), expect);
        assert_eq!(rasmussen(&d, RingTag::Mod2).unwrap(), expect);
        assert_eq!(classical_s_invariant(&d).unwrap(), expect);
    }
}

#[test]
fn classical_oracle_rejects_projective_diagrams() {
    let d = parse_diagram(ETA_ONE).unwrap();
    assert!(matches!(
        classical_khovanov(&d, RingTag::Rationals),
        Err(TheoryError::NotLocal)
    ));
}

#[test]
fn reduced_unknot_via_marked_essential_circle() {
    let d = parse_diagram("boundary a:t a:h\nmark a\n").unwrap();
    let h = reduced_homology(&d, TheoryTag::DoubledKhovanov, RingTag::Rationals).unwrap();
    assert_eq!(grid(&h), vec![(0, -2, 1, vec![]), (0, -1, 1, vec![])]);
}

#[test]
fn reduced_marked_kink_matches_reduced_unknot() {
    let d = parse_diagram(&format!("{KINK_POS}mark o\n")).unwrap();
    let h = reduced_homology(&d, TheoryTag::DoubledKhovanov, RingTag::Rationals).unwrap();
    assert_eq!(grid(&h), vec![(0, -2, 1, vec![]), (0, -1, 1, vec![])]);
}

#[test]
fn reduced_lee_is_rejected() {
    let d = parse_diagram("boundary a:t a:h\nmark a\n").unwrap();
    assert!(matches!(
        reduced_homology(&d, TheoryTag::DoubledLee, RingTag::Rationals),
        Err(TheoryError::ReducedLeeNotASubcomplex)
    ));
}

#[test]
fn reduced_requires_mark() {
    let d = parse_diagram("boundary a:t a:h\n").unwrap();
    assert!(matches!(
        reduced_homology(&d, TheoryTag::DoubledKhovanov, RingTag::Rationals),
        Err(TheoryError::MissingMark)
    ));
}

#[test]
fn canonical_generators_of_unknot() {
    let d = parse_diagram("unknot 1\n").unwrap();
    let cols = enumerate_two_colourings(&d);
    assert_eq!(cols.len(), 2);
    // Lee, orange circle, upper sheet: r^u = (v+^u + v-^u)/2.
    let orange = cols
        .iter()
        .find(|c| {
            c.segments()
                .all(|(_, col)| col == crate::colouring::Colour::Orange)
        })
        .unwrap();
    let r_u = canonical_generator(&d, orange, Sheet::Upper, TheoryTag::DoubledLee).unwrap();
    let half = Rat::new(1.into(), 2.into());
    assert_eq!(r_u.terms.len(), 2);
    for (g, c) in &r_u.terms {
        assert_eq!(g.sheet, Sheet::Upper);
        assert_eq!(*c, half);
    }
    // Bar-Natan, pink circle, upper sheet: b^u = v-^u.
    let pink = cols
        .iter()
        .find(|c| {
            c.segments()
                .all(|(_, col)| col == crate::colouring::Colour::Pink)
        })
        .unwrap();
    let b_u = canonical_generator(&d, pink, Sheet::Upper, TheoryTag::DoubledBarNatan).unwrap();
    assert_eq!(b_u.terms.len(), 1);
    assert_eq!(b_u.terms[0].0.labels, 1);
}

/// Rank of a set of cycles in homology at one degree: rank(cycles +
/// boundaries) - rank(boundaries).
pub(crate) fn rank_in_homology<T: FieldScalar>(
    dim: usize,
    boundaries: &[SparseVec<T>],
    cycles: &[SparseVec<T>],
) -> usize {
    let base = crate::exactalg::SparseMatrix::span_dim(dim, boundaries);
    let mut joint = boundaries.to_vec();
    joint.extend(cycles.iter().cloned());
    crate::exactalg::SparseMatrix::span_dim(dim, &joint) - base
}

#[test]
fn canonical_generators_are_cycles_of_full_rank() {
    for text in ["unknot 1\n", KINK_POS, KINK_NEG, "boundary a:t a:h\n"] {
        let d = parse_diagram(text).unwrap();
        let n = d.components().len();

        // Doubled Lee over Q.
        let (lee, layout) = build_lee(&d).unwrap();
        let gens = canonical_generators(&d, TheoryTag::DoubledLee).unwrap();
        assert_eq!(gens.len(), 1 << (n + 1));
        let mut by_degree: std::collections::BTreeMap<i64, Vec<SparseVec<Rat>>> =
            std::collections::BTreeMap::new();
        for g in &gens {
            let v = g.to_vector(&layout, |c| c.clone());
            if let Some(dmat) = lee.diff_from(g.degree) {
                assert!(dmat.apply(&v).is_empty(), "canonical chain is a cycle");
            }
            by_degree.entry(g.degree).or_default().push(v);
        }
        let mut total = 0;
        for (i, cycles) in &by_degree {
            let dim = lee.dim(*i);
            let boundaries: Vec<SparseVec<Rat>> = lee
                .diff_from(i - 1)
                .map(|m| {
                    m.transpose()
                        .rows()
                        .filter(|r| !r.is_empty())
                        .cloned()
                        .collect()
                })
                .unwrap_or_default();
            total += rank_in_homology(dim, &boundaries, cycles);
        }
        assert_eq!(total, 1 << (n + 1), "{text}: Lee canonical classes");

        // Doubled Bar-Natan over F_2: the canonical classes form a basis.
        let (bn, layout) = build_bn(&d).unwrap();
        let gens = canonical_generators(&d, TheoryTag::DoubledBarNatan).unwrap();
        let mut total = 0;
        let mut by_degree: std::collections::BTreeMap<i64, Vec<SparseVec<Mod2>>> =
            std::collections::BTreeMap::new();
        for g in &gens {
            let v = g.to_vector(&layout, |c| {
                Mod2(c.numer().bit(0))
            });
            if let Some(dmat) = bn.diff_from(g.degree) {
                assert!(dmat.apply(&v).is_empty());
            }
            by_degree.entry(g.degree).or_default().push(v);
        }
        for (i, cycles) in &by_degree {
            let dim = bn.dim(*i);
            let boundaries: Vec<SparseVec<Mod2>> = bn
                .diff_from(i - 1)
                .map(|m| {
                    m.transpose()
                        .rows()
                        .filter(|r| !r.is_empty())
                        .cloned()
                        .collect()
                })
                .unwrap_or_default();
            total += rank_in_homology(dim, &boundaries, cycles);
        }
        assert_eq!(total, 1 << (n + 1), "{text}: BN canonical classes");
        assert_eq!(
            total,
            bn_homology(&d).unwrap().total_rank(),
            "{text}: BN canonical classes form a basis"
        );
    }
}

#[test]
fn canonical_degree_equals_odd_writhe() {
    for text in [KINK_POS, KINK_NEG] {
        let d = parse_diagram(text).unwrap();
        for c in enumerate_two_colourings(&d) {
            for sheet in [Sheet::Upper, Sheet::Lower] {
                let g = canonical_generator(&d, &c, sheet, TheoryTag::DoubledLee).unwrap();
                assert_eq!(g.degree, crate::colouring::odd_writhe(&d, &c));
            }
        }
    }
}

#[test]
fn spectral_sequences_of_unknot_collapse() {
    let d = parse_diagram("unknot 1\n").unwrap();
    let lee = lee_spectral(&d).unwrap();
    assert_eq!(lee.nontrivial_page_count, 1);
    let bn = bn_spectral(&d).unwrap();
    assert_eq!(bn.nontrivial_page_count, 1);
}

#[test]
fn e2_page_matches_dkh_ranks() {
    for text in [KINK_POS, ETA_ONE, HOPF_POS] {
        let d = parse_diagram(text).unwrap();
        let lee = lee_spectral(&d).unwrap();
        let dkh = dkh_homology(&d, RingTag::Rationals).unwrap();
        let mut expect: std::collections::BTreeMap<(i64, i64), usize> =
            std::collections::BTreeMap::new();
        for c in &dkh.cells {
            if c.free_rank > 0 {
                expect.insert((c.i, c.j), c.free_rank);
            }
        }
        assert_eq!(lee.pages[0].ranks, expect, "{text} (Lee over Q)");

        let bn = bn_spectral(&d).unwrap();
        let dkh2 = dkh_homology(&d, RingTag::Mod2).unwrap();
        let mut expect: std::collections::BTreeMap<(i64, i64), usize> =
            std::collections::BTreeMap::new();
        for c in &dkh2.cells {
            if c.free_rank > 0 {
                expect.insert((c.i, c.j), c.free_rank);
            }
        }
        assert_eq!(bn.pages[0].ranks, expect, "{text} (BN over F2)");
    }
}

#[test]
fn filtration_grading_of_unknot_classes() {
    // The canonical classes of the unknot have filtration floors -1, -1,
    // -2, -2; the top grading 1 is achieved by r^u + p^u = v_+^u.
    let d = parse_diagram("unknot 1\n").unwrap();
    let (lee, layout) = build_lee(&d).unwrap();
    let gens = canonical_generators(&d, TheoryTag::DoubledLee).unwrap();
    let mut floors: Vec<i64> = gens
        .iter()
        .map(|g| {
            let v = g.to_vector(&layout, |c| c.clone());
            filtration_grading(&lee, g.degree, &v).unwrap()
        })
        .collect();
    floors.sort_unstable();
    assert_eq!(floors, vec![-2, -2, -1, -1]);

    let upper: Vec<&CanonicalChain> = gens.iter().filter(|g| g.sheet == Sheet::Upper).collect();
    let sum = {
        let a = upper[0].to_vector(&layout, |c| c.clone());
        let b = upper[1].to_vector(&layout, |c| c.clone());
        let mut v = a.clone();
        for (k, x) in b {
            let cur = v.remove(&k);
            let s = match cur {
                Some(c) => c + x,
                None => x,
            };
            if !Scalar::is_zero(&s) {
                v.insert(k, s);
            }
        }
        v
    };
    assert_eq!(filtration_grading(&lee, 0, &sum).unwrap(), 1);
}

#[test]
fn free_unknot_tensors_with_rank_two_column() {
    // The doubling is a single global shift, so a disjoint free unknot
    // tensors the underlying classical factor: the grid convolves with the
    // rank-2 column at j = +1 and j = -1 (the construction is not
    // multiplicative with respect to disjoint union).
    for text in [KINK_POS, ETA_ONE] {
        let d = parse_diagram(text).unwrap();
        let with = parse_diagram(&format!("{text}unknot 1\n")).unwrap();
        let h = dkh_homology(&d, RingTag::Rationals).unwrap();
        let hw = dkh_homology(&with, RingTag::Rationals).unwrap();
        let rank = |h: &HomologySummary, i: i64, j: i64| {
            h.cell(i, j).map(|c| c.free_rank).unwrap_or(0)
        };
        let mut bidegrees: Vec<(i64, i64)> = hw
            .cells
            .iter()
            .map(|c| (c.i, c.j))
            .chain(h.cells.iter().flat_map(|c| [(c.i, c.j + 1), (c.i, c.j - 1)]))
            .collect();
        bidegrees.sort_unstable();
        bidegrees.dedup();
        for (i, j) in bidegrees {
            assert_eq!(
                rank(&hw, i, j),
                rank(&h, i, j - 1) + rank(&h, i, j + 1),
                "{text} at ({i}, {j})"
            );
        }
    }
}

#[test]
fn build_complex_rejects_mismatched_rings() {
    let d = parse_diagram("unknot 1\n").unwrap();
    assert!(matches!(
        rasmussen(&d, RingTag::Integers),
        Err(TheoryError::RingMismatch { .. })
    ));
}
