//! Property tests over seeded random diagrams and matrices.

use num_bigint::BigInt;
use proptest::prelude::*;

use dkh::bundled::{bundled_all, BUNDLED};
use dkh::colouring::{coloured_smoothing, enumerate_two_colourings};
use dkh::cube::resolve;
use dkh::diagram::parse_diagram;
use dkh::exactalg::{smith_normal_form, Int, SparseMatrix};
use dkh::moves::{is_planar, random_script};

fn scramble(table_index: usize, seed: u64, len: usize) -> dkh::ProjectiveDiagram {
    let (_, d) = &bundled_all()[table_index % BUNDLED.len()];
    random_script(d, seed, len, 7).1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Parsing a serialized diagram reproduces it exactly.
    #[test]
    fn parse_serialize_round_trip(idx in 0usize..BUNDLED.len(), seed in 0u64..1000, len in 0usize..10) {
        let d = scramble(idx, seed, len);
        let reparsed = parse_diagram(&d.serialize()).unwrap();
        prop_assert_eq!(&d, &reparsed);
        prop_assert_eq!(d.serialize(), reparsed.serialize());
    }

    /// Scrambles remain valid, planar, and keep their component structure.
    #[test]
    fn scrambles_stay_well_formed(idx in 0usize..BUNDLED.len(), seed in 0u64..1000) {
        let (_, base) = &bundled_all()[idx % BUNDLED.len()];
        let d = scramble(idx, seed, 8);
        prop_assert!(d.validate().is_empty());
        if d.arc_count() > 0 {
            prop_assert!(is_planar(&d));
        }
        prop_assert_eq!(d.components().len(), base.components().len());
        prop_assert_eq!(
            d.degenerate_components().len(),
            base.degenerate_components().len()
        );
        prop_assert_eq!(d.boundary().len() % 2, 0);
    }

    /// The number of 2-colourings is 0 or 2^components, and coloured
    /// smoothings are monochromatic with at most one essential circle.
    #[test]
    fn colouring_counts_and_bipartite_smoothings(idx in 0usize..BUNDLED.len(), seed in 0u64..500) {
        let d = scramble(idx, seed, 6);
        let cols = enumerate_two_colourings(&d);
        let n = d.components().len();
        prop_assert!(cols.len() == 0 || cols.len() == 1 << n);
        for c in cols.iter().take(4) {
            let s = resolve(&d, coloured_smoothing(&d, c));
            for circle in &s.circles {
                let colour = dkh::colouring::circle_colour(&d, c, circle);
                prop_assert!(colour.is_some());
            }
            let essentials = s.circles.iter().filter(|x| x.is_essential()).count();
            prop_assert!(essentials <= 1);
        }
    }

    /// Smith normal form: unimodular transforms, diagonal divisibility.
    #[test]
    fn snf_invariants(entries in proptest::collection::vec(-9i64..=9, 1..=36), nr in 1usize..=6) {
        let nc = (entries.len() + nr - 1) / nr;
        let mut m = SparseMatrix::<Int>::zero(nr, nc);
        for (k, v) in entries.iter().enumerate() {
            let (i, j) = (k / nc, k % nc);
            if i < nr {
                m.set(i, j, BigInt::from(*v));
            }
        }
        let snf = smith_normal_form(&m);
        prop_assert_eq!(snf.u.matmul(&m).matmul(&snf.v), snf.d.clone());
        for w in snf.invariant_factors.windows(2) {
            prop_assert!((&w[1] % &w[0]) == BigInt::from(0));
        }
        for f in &snf.invariant_factors {
            prop_assert!(f > &BigInt::from(0));
        }
    }

    /// Cube edges change circle counts by at most one, and local diagrams
    /// have no Möbius edges.
    #[test]
    fn cube_edge_trichotomy(idx in 0usize..BUNDLED.len(), seed in 0u64..300) {
        let d = scramble(idx, seed, 6);
        let cube = dkh::cube::build_cube(&d).unwrap();
        for e in &cube.edges {
            let a = cube.vertex(e.from).circle_count() as i64;
            let b = cube.vertex(e.to).circle_count() as i64;
            prop_assert!((a - b).abs() <= 1);
            if d.is_local() {
                let is_eta = matches!(e.kind, dkh::cube::EdgeKind::Eta { .. });
                prop_assert!(!is_eta);
            }
        }
    }
}
