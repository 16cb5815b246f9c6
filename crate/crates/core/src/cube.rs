//! The cube of smoothings: full resolutions of a diagram, circles traced
//! through the antipodal identification, and signed edges classified as
//! pairs of pants (merge/split) or once-punctured Möbius bands (eta).

use thiserror::Error;

use rayon::prelude::*;

use crate::diagram::{End, Port, ProjectiveDiagram};
use crate::max_crossings;

/// Resolution choices, one bit per crossing in diagram order; bit value 1
/// selects the 1-resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SmoothingIndex {
    bits: u32,
    len: usize,
}

impl SmoothingIndex {
    pub fn new(bits: u32, len: usize) -> Self {
        assert!(len <= 32);
        assert!(len == 32 || bits < 1u32 << len);
        SmoothingIndex { bits, len }
    }

    pub fn zero(len: usize) -> Self {
        SmoothingIndex { bits: 0, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn bit(&self, crossing: usize) -> bool {
        self.bits >> crossing & 1 == 1
    }

    pub fn with_bit(&self, crossing: usize) -> Self {
        SmoothingIndex {
            bits: self.bits | 1 << crossing,
            len: self.len,
        }
    }

    pub fn ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Sign of the edge raising `crossing` from 0 to 1: (-1)^(number of
    /// 1-bits strictly before the crossing position).
    pub fn edge_sign(&self, crossing: usize) -> i8 {
        debug_assert!(!self.bit(crossing));
        let before = self.bits & ((1u32 << crossing) - 1);
        if before.count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl std::fmt::Display for SmoothingIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.bit(i) { 1 } else { 0 })?;
        }
        Ok(())
    }
}

/// A circle of a smoothing: the arcs it traverses, its wall-passage count
/// and whether it carries the basepoint. Circles coming from declared free
/// unknots have no arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circle {
    /// Canonical identifier: the smallest arc index on the circle, or
    /// arc_count + k for the k-th free unknot.
    pub id: usize,
    pub arcs: Vec<usize>,
    pub passages: usize,
    pub holds_mark: bool,
}

impl Circle {
    pub fn passage_parity(&self) -> u8 {
        (self.passages % 2) as u8
    }

    /// A circle crossing the projective wall an odd number of times is
    /// noncontractible in RP^2.
    pub fn is_essential(&self) -> bool {
        self.passages % 2 == 1
    }
}

/// A full resolution: its circles (sorted by canonical id) and its height
/// #(1-resolutions) - n_-.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smoothing {
    pub index: SmoothingIndex,
    pub circles: Vec<Circle>,
    pub height: i64,
}

impl Smoothing {
    pub fn circle_position(&self, id: usize) -> Option<usize> {
        self.circles.iter().position(|c| c.id == id)
    }

    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }
}

/// How the circles change along a cube edge, named by canonical circle ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// Two circles of the source merge into one: a pair of pants.
    Merge { a: usize, b: usize, into: usize },
    /// One circle splits into two.
    Split { from: usize, a: usize, b: usize },
    /// One circle returns as one circle: a once-punctured Möbius band.
    Eta { from: usize, to: usize },
}

/// An edge of the cube: the two smoothings differ at one crossing (0 -> 1).
/// Bystander circles keep their canonical id across the edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedEdge {
    pub from: SmoothingIndex,
    pub to: SmoothingIndex,
    pub crossing: usize,
    pub kind: EdgeKind,
    pub sign: i8,
}

/// All 2^n smoothings with the n * 2^(n-1) signed edges between them.
#[derive(Debug, Clone)]
pub struct Cube {
    pub vertices: Vec<Smoothing>,
    pub edges: Vec<SignedEdge>,
}

impl Cube {
    pub fn vertex(&self, idx: SmoothingIndex) -> &Smoothing {
        &self.vertices[idx.bits() as usize]
    }
}

#[derive(Debug, Error)]
pub enum CubeError {
    #[error("diagram has {crossings} crossings, above the configured cube limit {limit}")]
    TooLarge { crossings: usize, limit: usize },
}

/// The two joins replacing a crossing: the 0-resolution connects slots
/// (1,2) and (3,4), the 1-resolution slots (1,4) and (2,3), in the
/// counterclockwise numbering rooted at the incoming under-strand.
fn joins(resolution: bool) -> [(usize, usize); 2] {
    if resolution {
        [(0, 3), (1, 2)]
    } else {
        [(0, 1), (2, 3)]
    }
}

/// Resolves the diagram at the given index and traces the circles.
pub fn resolve(d: &ProjectiveDiagram, idx: SmoothingIndex) -> Smoothing {
    assert_eq!(idx.len(), d.crossing_count(), "index length mismatch");
    // Partner of each arc end through the smoothing joins and the wall.
    let key = |arc: usize, end: End| arc * 2 + if end == End::Head { 1 } else { 0 };
    let mut partner: Vec<Option<(usize, End)>> = vec![None; d.arc_count() * 2];
    for (ci, c) in d.crossings().iter().enumerate() {
        for (s1, s2) in joins(idx.bit(ci)) {
            let a = c.slots[s1];
            let b = c.slots[s2];
            partner[key(a.arc, a.end)] = Some((b.arc, b.end));
            partner[key(b.arc, b.end)] = Some((a.arc, a.end));
        }
    }
    let boundary = d.boundary();
    for pos in 0..boundary.len() {
        let a = boundary[pos];
        let b = boundary[d.antipode(pos)];
        partner[key(a.arc, a.end)] = Some((b.arc, b.end));
    }

    let mut seen = vec![false; d.arc_count()];
    let mut circles = Vec::new();
    for start in 0..d.arc_count() {
        if seen[start] {
            continue;
        }
        // Walk the circle through `start`, alternating arcs and connectors;
        // each boundary connector crossed is one wall passage.
        let mut arcs = Vec::new();
        let mut passages = 0usize;
        let mut arc = start;
        let mut end = End::Head;
        loop {
            if !seen[arc] {
                seen[arc] = true;
                arcs.push(arc);
            }
            let port = match end {
                End::Head => d.head_port(arc),
                End::Tail => d.tail_port(arc),
            };
            if matches!(port, Port::Boundary { .. }) {
                passages += 1;
            }
            let (next_arc, next_end) =
                partner[key(arc, end)].expect("validated diagram has total join pairing");
            arc = next_arc;
            end = next_end.flip();
            if arc == start && end == End::Head {
                break;
            }
        }
        let mut sorted = arcs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        debug_assert_eq!(sorted.len(), arcs.len(), "each arc lies on one circle");
        let holds_mark = d.mark().map(|m| sorted.contains(&m)).unwrap_or(false);
        circles.push(Circle {
            id: sorted[0],
            arcs: sorted,
            passages,
            holds_mark,
        });
    }
    for k in 0..d.free_unknots() {
        circles.push(Circle {
            id: d.arc_count() + k,
            arcs: Vec::new(),
            passages: 0,
            holds_mark: false,
        });
    }
    circles.sort_by_key(|c| c.id);
    debug_assert!(
        circles.iter().filter(|c| c.is_essential()).count() <= 1,
        "disjoint essential curves cannot coexist in RP^2"
    );
    Smoothing {
        index: idx,
        circles,
        height: idx.ones() as i64 - d.negative_crossings() as i64,
    }
}

/// Classifies the edge raising `crossing` from 0 to 1 at `idx`.
pub fn classify_edge(d: &ProjectiveDiagram, idx: SmoothingIndex, crossing: usize) -> SignedEdge {
    assert!(!idx.bit(crossing), "edge starts at a 0-resolution");
    let from = resolve(d, idx);
    let to = resolve(d, idx.with_bit(crossing));
    classify_edge_between(d, &from, &to, crossing)
}

pub(crate) fn classify_edge_between(
    d: &ProjectiveDiagram,
    from: &Smoothing,
    to: &Smoothing,
    crossing: usize,
) -> SignedEdge {
    let touched: Vec<usize> = d.crossings()[crossing]
        .slots
        .iter()
        .map(|r| r.arc)
        .collect();
    let touching = |s: &Smoothing| -> Vec<usize> {
        s.circles
            .iter()
            .filter(|c| c.arcs.iter().any(|a| touched.contains(a)))
            .map(|c| c.id)
            .collect()
    };
    let src = touching(from);
    let dst = touching(to);
    let kind = match (src.len(), dst.len()) {
        (2, 1) => EdgeKind::Merge {
            a: src[0],
            b: src[1],
            into: dst[0],
        },
        (1, 2) => EdgeKind::Split {
            from: src[0],
            a: dst[0],
            b: dst[1],
        },
        (1, 1) => EdgeKind::Eta {
            from: src[0],
            to: dst[0],
        },
        other => panic!("impossible circle change {other:?} at crossing {crossing}"),
    };
    // Bystanders must correspond identically on both sides.
    debug_assert!({
        let ids = |s: &Smoothing, skip: &[usize]| {
            s.circles
                .iter()
                .filter(|c| !skip.contains(&c.id))
                .map(|c| (c.id, c.arcs.clone(), c.passages))
                .collect::<Vec<_>>()
        };
        ids(from, &src) == ids(to, &dst)
    });
    SignedEdge {
        from: from.index,
        to: to.index,
        crossing,
        kind,
        sign: from.index.edge_sign(crossing),
    }
}

/// Builds the complete cube of smoothings.
pub fn build_cube(d: &ProjectiveDiagram) -> Result<Cube, CubeError> {
    let n = d.crossing_count();
    let limit = max_crossings();
    if n > limit {
        return Err(CubeError::TooLarge {
            crossings: n,
            limit,
        });
    }
    let vertices: Vec<Smoothing> = (0..1u64 << n)
        .into_par_iter()
        .map(|mask| resolve(d, SmoothingIndex::new(mask as u32, n)))
        .collect();
    let mut edges = Vec::with_capacity(n << n.saturating_sub(1));
    for mask in 0..1u64 << n {
        let idx = SmoothingIndex::new(mask as u32, n);
        for c in 0..n {
            if !idx.bit(c) {
                let to = idx.with_bit(c);
                edges.push(classify_edge_between(
                    d,
                    &vertices[mask as usize],
                    &vertices[to.bits() as usize],
                    c,
                ));
            }
        }
    }
    Ok(Cube { vertices, edges })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::diagram::parse_diagram;

    pub(crate) const KINK_POS: &str = "crossing x o:h o:t l:t l:h\n";
    pub(crate) const KINK_NEG: &str = "crossing x o:h l:h l:t o:t\n";
    pub(crate) const ETA_ONE: &str = "\
crossing x a1:h b2:t a2:t b1:h
boundary a1:t b2:h a2:h b1:t
";

    #[test]
    fn unknot_cube_is_a_point() {
        let d = parse_diagram("unknot 1\n").unwrap();
        let cube = build_cube(&d).unwrap();
        assert_eq!(cube.vertices.len(), 1);
        assert_eq!(cube.edges.len(), 0);
        assert_eq!(cube.vertices[0].circle_count(), 1);
        assert!(!cube.vertices[0].circles[0].is_essential());
    }

    #[test]
    fn essential_circle_has_odd_passage_parity() {
        let d = parse_diagram("boundary a:t a:h\n").unwrap();
        let s = resolve(&d, SmoothingIndex::zero(0));
        assert_eq!(s.circle_count(), 1);
        assert_eq!(s.circles[0].passages, 1);
        assert!(s.circles[0].is_essential());
    }

    #[test]
    fn positive_kink_resolutions() {
        let d = parse_diagram(KINK_POS).unwrap();
        assert_eq!(d.sign(0), 1);
        let s0 = resolve(&d, SmoothingIndex::new(0, 1));
        let s1 = resolve(&d, SmoothingIndex::new(1, 1));
        assert_eq!(s0.circle_count(), 2);
        assert_eq!(s1.circle_count(), 1);
        let e = classify_edge(&d, SmoothingIndex::zero(1), 0);
        assert!(matches!(e.kind, EdgeKind::Merge { .. }));
        assert_eq!(e.sign, 1);
    }

    #[test]
    fn negative_kink_resolutions() {
        let d = parse_diagram(KINK_NEG).unwrap();
        assert_eq!(d.sign(0), -1);
        let s0 = resolve(&d, SmoothingIndex::new(0, 1));
        let s1 = resolve(&d, SmoothingIndex::new(1, 1));
        assert_eq!(s0.circle_count(), 1);
        assert_eq!(s1.circle_count(), 2);
        let e = classify_edge(&d, SmoothingIndex::zero(1), 0);
        assert!(matches!(e.kind, EdgeKind::Split { .. }));
    }

    #[test]
    fn wall_crossing_pair_gives_eta() {
        // One crossing between the two strands of a doubled essential curve:
        // both resolutions have a single circle.
        let d = parse_diagram(ETA_ONE).unwrap();
        let s0 = resolve(&d, SmoothingIndex::new(0, 1));
        let s1 = resolve(&d, SmoothingIndex::new(1, 1));
        assert_eq!(s0.circle_count(), 1);
        assert_eq!(s1.circle_count(), 1);
        let e = classify_edge(&d, SmoothingIndex::zero(1), 0);
        assert!(matches!(e.kind, EdgeKind::Eta { .. }));
    }

    #[test]
    fn edge_signs() {
        let idx = SmoothingIndex::new(0, 3);
        assert_eq!(idx.edge_sign(0), 1);
        assert_eq!(idx.edge_sign(2), 1);
        let idx = SmoothingIndex::new(0b01, 2);
        assert_eq!(idx.edge_sign(1), -1);
    }

    #[test]
    fn every_face_has_odd_sign_count() {
        // Purely combinatorial: check all faces of all masks up to n = 4.
        for n in 2..=4usize {
            for mask in 0..1u32 << n {
                for p in 0..n {
                    for q in (p + 1)..n {
                        let idx = SmoothingIndex::new(mask, n);
                        if idx.bit(p) || idx.bit(q) {
                            continue;
                        }
                        let product = idx.edge_sign(p) as i32
                            * idx.edge_sign(q) as i32
                            * idx.with_bit(p).edge_sign(q) as i32
                            * idx.with_bit(q).edge_sign(p) as i32;
                        assert_eq!(product, -1, "face at {idx} ({p},{q})");
                    }
                }
            }
        }
    }

    #[test]
    fn two_crossing_cube_counts() {
        // Two disjoint kinked unknots: 4 vertices, 4 edges, one minus sign.
        let d = parse_diagram("crossing x a:h a:t b:t b:h\ncrossing y c:h c:t d:t d:h\n").unwrap();
        let cube = build_cube(&d).unwrap();
        assert_eq!(cube.vertices.len(), 4);
        assert_eq!(cube.edges.len(), 4);
        let minus = cube.edges.iter().filter(|e| e.sign < 0).count();
        assert_eq!(minus, 1);
    }

    #[test]
    fn circle_count_delta_is_at_most_one() {
        for text in [KINK_POS, KINK_NEG, ETA_ONE] {
            let d = parse_diagram(text).unwrap();
            let cube = build_cube(&d).unwrap();
            for e in &cube.edges {
                let a = cube.vertex(e.from).circle_count() as i64;
                let b = cube.vertex(e.to).circle_count() as i64;
                assert!((a - b).abs() <= 1);
            }
        }
    }

    #[test]
    fn local_diagrams_have_no_eta_edges() {
        for text in [KINK_POS, KINK_NEG] {
            let d = parse_diagram(text).unwrap();
            let cube = build_cube(&d).unwrap();
            assert!(d.is_local());
            assert!(cube
                .edges
                .iter()
                .all(|e| !matches!(e.kind, EdgeKind::Eta { .. })));
        }
    }

    #[test]
    fn size_limit_reported() {
        // 21 disjoint kinked unknots exceed the default limit of 20.
        let mut text = String::new();
        for i in 0..21 {
            text.push_str(&format!("crossing x{i} a{i}:h a{i}:t b{i}:t b{i}:h\n"));
        }
        let d = parse_diagram(&text).unwrap();
        assert!(matches!(
            build_cube(&d),
            Err(CubeError::TooLarge { crossings: 21, .. })
        ));
    }

    #[test]
    fn affected_circle_counts_are_consistent() {
        let d = parse_diagram(ETA_ONE).unwrap();
        let cube = build_cube(&d).unwrap();
        for e in &cube.edges {
            let from = cube.vertex(e.from);
            let to = cube.vertex(e.to);
            let (affected_from, affected_to) = match e.kind {
                EdgeKind::Merge { .. } => (2, 1),
                EdgeKind::Split { .. } => (1, 2),
                EdgeKind::Eta { .. } => (1, 1),
            };
            assert_eq!(
                from.circle_count() - affected_from,
                to.circle_count() - affected_to
            );
        }
    }
}
