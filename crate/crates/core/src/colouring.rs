//! 2-colourings of the diagram shadow: colour assignments to shadow
//! segments that swap at every crossing passage and run continuously
//! through the antipodal identification. They stand in for orientations in
//! the doubled theories, prescribing smoothings, crossing parities and odd
//! writhes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cube::{Circle, SmoothingIndex};
use crate::diagram::ProjectiveDiagram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Colour {
    Orange,
    Pink,
}

impl Colour {
    pub fn swap(self) -> Colour {
        match self {
            Colour::Orange => Colour::Pink,
            Colour::Pink => Colour::Orange,
        }
    }
}

/// A colour per shadow segment. Segments are maximal arc runs between
/// crossing passages, glued through the wall; they are identified by their
/// smallest arc index (free unknots get ids past the arc range).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoColouring {
    colour: BTreeMap<usize, Colour>,
}

impl TwoColouring {
    pub fn colour_of_segment(&self, segment: usize) -> Colour {
        self.colour[&segment]
    }

    pub fn segments(&self) -> impl Iterator<Item = (usize, Colour)> + '_ {
        self.colour.iter().map(|(s, c)| (*s, *c))
    }

    pub fn swapped(&self) -> TwoColouring {
        TwoColouring {
            colour: self
                .colour
                .iter()
                .map(|(s, c)| (*s, c.swap()))
                .collect(),
        }
    }
}

/// Crossing parities with respect to a 2-colouring: a crossing is odd when
/// its coloured resolution differs from its oriented resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingParity {
    /// true = odd, indexed by crossing.
    pub odd: Vec<bool>,
    pub odd_positive: usize,
    pub odd_negative: usize,
    pub even_positive: usize,
    pub even_negative: usize,
}

impl CrossingParity {
    pub fn odd_writhe(&self) -> i64 {
        self.odd_positive as i64 - self.odd_negative as i64
    }
}

/// Shadow segments: arcs glued through the wall. Returns the segment id of
/// every arc (the smallest arc index in its segment).
pub fn shadow_segments(d: &ProjectiveDiagram) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..d.arc_count()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    let k = d.wall_passages();
    for pos in 0..k {
        let a = d.boundary()[pos].arc;
        let b = d.boundary()[pos + k].arc;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            let min = ra.min(rb);
            let max = ra.max(rb);
            parent[max] = min;
        }
    }
    (0..d.arc_count())
        .map(|a| find(&mut parent, a))
        .collect()
}

/// Segment id of each circle-forming unit: arcs map to their segment, the
/// k-th free unknot to arc_count + k.
fn segment_of_arc(segments: &[usize], arc: usize) -> usize {
    segments[arc]
}

/// Enumerates the 2-colourings of the diagram.
///
/// The count is 0 when some component is degenerate and 2^n otherwise
/// (n the number of link components); output order is lexicographic in the
/// per-component colour bits, components ordered by smallest segment id.
pub fn enumerate_two_colourings(d: &ProjectiveDiagram) -> Vec<TwoColouring> {
    let segments = shadow_segments(d);
    let mut seg_ids: Vec<usize> = segments.iter().copied().collect();
    for k in 0..d.free_unknots() {
        seg_ids.push(d.arc_count() + k);
    }
    seg_ids.sort_unstable();
    seg_ids.dedup();

    // Swap constraints: the two passes of each crossing's strands.
    let mut adjacency: BTreeMap<usize, Vec<usize>> =
        seg_ids.iter().map(|s| (*s, Vec::new())).collect();
    for c in d.crossings() {
        for (s1, s2) in [(0usize, 2usize), (1, 3)] {
            let a = segment_of_arc(&segments, c.slots[s1].arc);
            let b = segment_of_arc(&segments, c.slots[s2].arc);
            adjacency.get_mut(&a).unwrap().push(b);
            adjacency.get_mut(&b).unwrap().push(a);
        }
    }

    // Bipartition each connected component of the constraint graph; a
    // frustrated component means no colouring exists.
    let mut side: BTreeMap<usize, bool> = BTreeMap::new();
    let mut roots: Vec<usize> = Vec::new();
    for &start in &seg_ids {
        if side.contains_key(&start) {
            continue;
        }
        roots.push(start);
        side.insert(start, false);
        let mut queue = vec![start];
        while let Some(s) = queue.pop() {
            let here = side[&s];
            for n in adjacency[&s].clone() {
                match side.get(&n) {
                    None => {
                        side.insert(n, !here);
                        queue.push(n);
                    }
                    Some(v) => {
                        if *v == here {
                            return Vec::new();
                        }
                    }
                }
            }
        }
    }

    let component_root: BTreeMap<usize, usize> = {
        // Recompute reachability to attribute each segment to its root.
        let mut out = BTreeMap::new();
        let mut seen: BTreeMap<usize, bool> = seg_ids.iter().map(|s| (*s, false)).collect();
        for &root in &roots {
            let mut queue = vec![root];
            seen.insert(root, true);
            out.insert(root, root);
            while let Some(s) = queue.pop() {
                for n in adjacency[&s].clone() {
                    if !seen[&n] {
                        seen.insert(n, true);
                        out.insert(n, root);
                        queue.push(n);
                    }
                }
            }
        }
        out
    };

    let n = roots.len();
    assert!(n < 24, "too many components to enumerate colourings");
    let mut out = Vec::with_capacity(1 << n);
    for bits in 0..1u32 << n {
        let mut colour = BTreeMap::new();
        for &s in &seg_ids {
            let root = component_root[&s];
            let comp_pos = roots.iter().position(|r| *r == root).unwrap();
            // Bit 0 of `bits` controls the first component; within a
            // component the bipartition side fixes everything.
            let flip = bits >> (n - 1 - comp_pos) & 1 == 1;
            let base = side[&s] ^ flip;
            colour.insert(s, if base { Colour::Pink } else { Colour::Orange });
        }
        out.push(TwoColouring { colour });
    }
    out
}

/// The smoothing prescribed by a 2-colouring: at each crossing, the unique
/// resolution joining equal-coloured strand ends.
pub fn coloured_smoothing(d: &ProjectiveDiagram, c: &TwoColouring) -> SmoothingIndex {
    let segments = shadow_segments(d);
    let col = |arc: usize| c.colour_of_segment(segment_of_arc(&segments, arc));
    let mut idx = SmoothingIndex::zero(d.crossing_count());
    for (ci, site) in d.crossings().iter().enumerate() {
        let c0 = col(site.slots[0].arc);
        let c1 = col(site.slots[1].arc);
        let c2 = col(site.slots[2].arc);
        let c3 = col(site.slots[3].arc);
        debug_assert_ne!(c0, c2, "under-strand swaps colour");
        debug_assert_ne!(c1, c3, "over-strand swaps colour");
        if c0 == c1 {
            debug_assert_eq!(c2, c3);
            // 0-resolution joins slots (1,2) and (3,4).
        } else {
            debug_assert_eq!(c0, c3);
            idx = idx.with_bit(ci);
        }
    }
    idx
}

/// Even/odd designation of every crossing with respect to a 2-colouring,
/// with the four sign-refined counts.
pub fn crossing_parity(d: &ProjectiveDiagram, c: &TwoColouring) -> CrossingParity {
    let coloured = coloured_smoothing(d, c);
    let mut parity = CrossingParity {
        odd: Vec::with_capacity(d.crossing_count()),
        odd_positive: 0,
        odd_negative: 0,
        even_positive: 0,
        even_negative: 0,
    };
    for ci in 0..d.crossing_count() {
        let positive = d.sign(ci) > 0;
        // The oriented resolution is 0 for positive crossings, 1 for
        // negative ones.
        let oriented_bit = !positive;
        let odd = coloured.bit(ci) != oriented_bit;
        parity.odd.push(odd);
        match (odd, positive) {
            (true, true) => parity.odd_positive += 1,
            (true, false) => parity.odd_negative += 1,
            (false, true) => parity.even_positive += 1,
            (false, false) => parity.even_negative += 1,
        }
    }
    parity
}

/// The quantity n^o_+ - n^o_-, the homological degree of the canonical
/// generators built on this colouring.
pub fn odd_writhe(d: &ProjectiveDiagram, c: &TwoColouring) -> i64 {
    crossing_parity(d, c).odd_writhe()
}

/// All odd writhes over the 2-colourings of the diagram (deduplicated,
/// sorted); empty exactly when the diagram is not 2-colourable.
pub fn odd_writhe_set(d: &ProjectiveDiagram) -> Vec<i64> {
    let mut out: Vec<i64> = enumerate_two_colourings(d)
        .iter()
        .map(|c| odd_writhe(d, c))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Colour of a circle in a coloured smoothing; None if the circle is not
/// monochromatic.
pub fn circle_colour(
    d: &ProjectiveDiagram,
    c: &TwoColouring,
    circle: &Circle,
) -> Option<Colour> {
    if circle.arcs.is_empty() {
        // Free unknot: its segment id is its circle id.
        return Some(c.colour_of_segment(circle.id));
    }
    let segments = shadow_segments(d);
    let mut colours = circle
        .arcs
        .iter()
        .map(|a| c.colour_of_segment(segment_of_arc(&segments, *a)));
    let first = colours.next().unwrap();
    colours.all(|x| x == first).then_some(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::resolve;
    use crate::diagram::parse_diagram;

    const KINK_POS: &str = "crossing x o:h o:t l:t l:h\n";
    const DEGENERATE: &str = "\
crossing x a1:h b2:t a2:t b1:h
boundary a1:t b2:h a2:h b1:t
";

    #[test]
    fn unknot_has_two_colourings() {
        let d = parse_diagram("unknot 1\n").unwrap();
        assert_eq!(enumerate_two_colourings(&d).len(), 2);
    }

    #[test]
    fn kink_diagram_has_two_colourings() {
        let d = parse_diagram(KINK_POS).unwrap();
        let cols = enumerate_two_colourings(&d);
        assert_eq!(cols.len(), 2);
        assert_eq!(cols[0].swapped(), cols[1]);
    }

    #[test]
    fn degenerate_link_has_no_colourings() {
        let d = parse_diagram(DEGENERATE).unwrap();
        assert!(enumerate_two_colourings(&d).is_empty());
    }

    #[test]
    fn colouring_count_is_zero_or_power_of_two() {
        for text in [
            "unknot 2\n",
            KINK_POS,
            DEGENERATE,
            "boundary a:t a:h\nunknot 1\n",
        ] {
            let d = parse_diagram(text).unwrap();
            let n = d.components().len();
            let count = enumerate_two_colourings(&d).len();
            assert!(count == 0 || count == 1 << n, "{text}: {count}");
        }
    }

    #[test]
    fn coloured_smoothing_of_kink_is_two_circle_side() {
        let d = parse_diagram(KINK_POS).unwrap();
        for c in enumerate_two_colourings(&d) {
            let idx = coloured_smoothing(&d, &c);
            let s = resolve(&d, idx);
            assert_eq!(s.circle_count(), 2);
        }
    }

    #[test]
    fn coloured_smoothing_is_monochromatic() {
        for text in [KINK_POS, "crossing x o:h l:h l:t o:t\n"] {
            let d = parse_diagram(text).unwrap();
            for c in enumerate_two_colourings(&d) {
                let idx = coloured_smoothing(&d, &c);
                let s = resolve(&d, idx);
                for circle in &s.circles {
                    assert!(circle_colour(&d, &c, circle).is_some());
                }
            }
        }
    }

    #[test]
    fn swap_preserves_smoothing_and_parity() {
        let d = parse_diagram(KINK_POS).unwrap();
        let cols = enumerate_two_colourings(&d);
        let a = &cols[0];
        let b = a.swapped();
        assert_eq!(coloured_smoothing(&d, a), coloured_smoothing(&d, &b));
        assert_eq!(crossing_parity(&d, a).odd, crossing_parity(&d, &b).odd);
    }

    #[test]
    fn local_kinks_are_all_even() {
        for text in [KINK_POS, "crossing x o:h l:h l:t o:t\n"] {
            let d = parse_diagram(text).unwrap();
            for c in enumerate_two_colourings(&d) {
                let p = crossing_parity(&d, &c);
                assert!(p.odd.iter().all(|o| !o), "{text}");
                assert_eq!(p.odd_writhe(), 0);
            }
        }
    }

    #[test]
    fn parity_counts_partition_by_sign() {
        let d = parse_diagram(KINK_POS).unwrap();
        for c in enumerate_two_colourings(&d) {
            let p = crossing_parity(&d, &c);
            assert_eq!(p.odd_positive + p.even_positive, 1);
            assert_eq!(p.odd_negative + p.even_negative, 0);
        }
    }
}
