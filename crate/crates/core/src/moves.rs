//! Reidemeister moves for projective diagrams and a seeded random move
//! generator.
//!
//! Combinatorially a diagram is a rotation system: counterclockwise slot
//! orders at crossings plus the cyclic boundary word. Faces of the tangle
//! in the disk are traced by collapsing the outside of the disk to a single
//! vertex; a valid diagram has genus zero (Euler characteristic 2 per
//! connected piece), and every move application checks this is preserved.
//!
//! The five moves: R1 kink add/remove, R2 poke/cancel, R3 triangle slide
//! (classical, inside the disk), R4 sliding a crossing through the wall
//! (which exchanges over and under and keeps the sign), and R5 pushing an
//! arc across the wall (two new passages and a cap on the antipodal side).

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{End, Port, ProjectiveDiagram};

/// A side of an arc: the dart (a, e) traverses a from end e to the other
/// end, with one fixed face on its left; the two darts of an arc see the
/// arc's two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dart {
    pub arc: usize,
    pub end: End,
}

/// Face structure of the tangle in the disk, with the outside collapsed to
/// one vertex.
pub struct Faces {
    pub faces: Vec<Vec<Dart>>,
    face_of: BTreeMap<(usize, End), usize>,
}

impl Faces {
    pub fn face_of(&self, dart: Dart) -> usize {
        self.face_of[&(dart.arc, dart.end)]
    }
}

/// Next port counterclockwise at the vertex holding `port`.
fn rotate(d: &ProjectiveDiagram, port: Port) -> Port {
    match port {
        Port::Slot { crossing, slot } => Port::Slot {
            crossing,
            slot: (slot + 1) % 4,
        },
        Port::Boundary { position } => {
            // Seen from the collapsed outside, the boundary word runs
            // clockwise, so the counterclockwise successor is the previous
            // position.
            let n = d.boundary().len();
            Port::Boundary {
                position: (position + n - 1) % n,
            }
        }
    }
}

fn port_of(d: &ProjectiveDiagram, dart: Dart) -> Port {
    match dart.end {
        End::Head => d.head_port(dart.arc),
        End::Tail => d.tail_port(dart.arc),
    }
}

/// Traces all faces of the rotation system.
pub fn faces(d: &ProjectiveDiagram) -> Faces {
    let mut face_of = BTreeMap::new();
    let mut faces = Vec::new();
    for arc in 0..d.arc_count() {
        for end in [End::Tail, End::Head] {
            if face_of.contains_key(&(arc, end)) {
                continue;
            }
            let id = faces.len();
            let mut walk = Vec::new();
            let mut dart = Dart { arc, end };
            loop {
                if face_of.contains_key(&(dart.arc, dart.end)) {
                    break;
                }
                face_of.insert((dart.arc, dart.end), id);
                walk.push(dart);
                let other = Dart {
                    arc: dart.arc,
                    end: dart.end.flip(),
                };
                let next_port = rotate(d, port_of(d, other));
                let r = d.at_port(next_port);
                dart = Dart {
                    arc: r.arc,
                    end: r.end,
                };
            }
            faces.push(walk);
        }
    }
    Faces { face_of, faces }
}

/// Connected piece of the diagram graph (crossings, wall vertex, arcs)
/// containing each arc. Pieces that do not meet are positionally free with
/// respect to each other: where in each other's faces they sit is not
/// recorded by the rotation system.
pub fn graph_pieces(d: &ProjectiveDiagram) -> Vec<usize> {
    let n = d.crossing_count();
    let vid = |port: Port| match port {
        Port::Slot { crossing, .. } => crossing,
        Port::Boundary { .. } => n,
    };
    let mut parent: Vec<usize> = (0..n + 1).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for arc in 0..d.arc_count() {
        let a = find(&mut parent, vid(d.tail_port(arc)));
        let b = find(&mut parent, vid(d.head_port(arc)));
        if a != b {
            parent[a] = b;
        }
    }
    (0..d.arc_count())
        .map(|arc| find(&mut parent, vid(d.tail_port(arc))))
        .collect()
}

/// Euler-characteristic planarity check for the rotation system, per
/// connected piece of the diagram graph: each piece must satisfy
/// V - E + F = 2 on the sphere obtained by collapsing the outside.
pub fn is_planar(d: &ProjectiveDiagram) -> bool {
    if d.arc_count() == 0 {
        return true;
    }
    let n = d.crossing_count();
    let vid = |port: Port| match port {
        Port::Slot { crossing, .. } => crossing,
        Port::Boundary { .. } => n,
    };
    let mut parent: Vec<usize> = (0..n + 1).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for arc in 0..d.arc_count() {
        let a = find(&mut parent, vid(d.tail_port(arc)));
        let b = find(&mut parent, vid(d.head_port(arc)));
        if a != b {
            parent[a] = b;
        }
    }
    let fs = faces(d);
    let mut v_count = BTreeMap::new();
    let mut e_count = BTreeMap::new();
    let mut f_count = BTreeMap::new();
    let mut used_vertex = vec![false; n + 1];
    for arc in 0..d.arc_count() {
        used_vertex[vid(d.tail_port(arc))] = true;
        used_vertex[vid(d.head_port(arc))] = true;
    }
    for v in 0..n + 1 {
        if used_vertex[v] {
            let root = find(&mut parent, v);
            *v_count.entry(root).or_insert(0usize) += 1;
        }
    }
    for arc in 0..d.arc_count() {
        let root = find(&mut parent, vid(d.tail_port(arc)));
        *e_count.entry(root).or_insert(0usize) += 1;
    }
    for walk in &fs.faces {
        let root = find(&mut parent, vid(port_of(d, walk[0])));
        *f_count.entry(root).or_insert(0usize) += 1;
    }
    v_count.iter().all(|(root, v)| {
        let e = e_count.get(root).copied().unwrap_or(0);
        let f = f_count.get(root).copied().unwrap_or(0);
        *v as i64 - e as i64 + f as i64 == 2
    })
}

/// One move application site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    /// Add a kink on an arc. Variants: 0 = positive/loop-after, 1 =
    /// negative/loop-after, 2 = positive/loop-before, 3 = negative.
    R1Add { arc: String, variant: u8 },
    R1Remove { crossing: String },
    /// Poke `over` across `under`; the named darts must share a face.
    R2Add {
        over: String,
        over_end: End,
        under: String,
        under_end: End,
    },
    /// Cancel the poke bigon bounded by these two arcs.
    R2Remove { side_a: String, side_b: String },
    /// Slide the triangle face bounded by these three arcs.
    R3 { sides: [String; 3] },
    /// Slide a crossing through the wall.
    R4 { crossing: String },
    /// Push this side of an arc through the wall at the gap following the
    /// given boundary position (ignored when the diagram is local).
    R5Add {
        arc: String,
        end: End,
        gap: usize,
    },
    /// Retract the crossing-free cap with both ends on consecutive
    /// boundary positions.
    R5Remove { cap: String },
}

impl Move {
    pub fn kind(&self) -> &'static str {
        match self {
            Move::R1Add { .. } => "R1+",
            Move::R1Remove { .. } => "R1-",
            Move::R2Add { .. } => "R2+",
            Move::R2Remove { .. } => "R2-",
            Move::R3 { .. } => "R3",
            Move::R4 { .. } => "R4",
            Move::R5Add { .. } => "R5+",
            Move::R5Remove { .. } => "R5-",
        }
    }
}

/// A reproducible sequence of moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct MoveScript {
    pub moves: Vec<Move>,
}

#[derive(Debug, Error)]
pub enum MoveError {
    #[error("move not applicable: {0}")]
    NotApplicable(String),
    #[error("move produced an invalid diagram: {0}")]
    Broken(String),
}

fn nope<T>(msg: impl Into<String>) -> Result<T, MoveError> {
    Err(MoveError::NotApplicable(msg.into()))
}

/// Mutable, name-based diagram parts used while rewiring.
#[derive(Clone)]
struct Parts {
    crossings: Vec<(String, [(String, End); 4])>,
    boundary: Vec<(String, End)>,
    free_unknots: usize,
    mark: Option<String>,
}

impl Parts {
    fn from(d: &ProjectiveDiagram) -> Self {
        let name = |r: &crate::diagram::ArcRef| (d.arc_name(r.arc).to_string(), r.end);
        Parts {
            crossings: d
                .crossings()
                .iter()
                .map(|c| {
                    (
                        c.name.clone(),
                        [
                            name(&c.slots[0]),
                            name(&c.slots[1]),
                            name(&c.slots[2]),
                            name(&c.slots[3]),
                        ],
                    )
                })
                .collect(),
            boundary: d.boundary().iter().map(|r| name(r)).collect(),
            free_unknots: d.free_unknots(),
            mark: d.mark().map(|m| d.arc_name(m).to_string()),
        }
    }

    fn arc_names(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        for (_, slots) in &self.crossings {
            for (a, _) in slots {
                out.insert(a.clone());
            }
        }
        for (a, _) in &self.boundary {
            out.insert(a.clone());
        }
        out
    }

    fn fresh_arc(&self, base: &str) -> String {
        let names = self.arc_names();
        if !names.contains(base) {
            return base.to_string();
        }
        for k in 2.. {
            let cand = format!("{base}.{k}");
            if !names.contains(&cand) {
                return cand;
            }
        }
        unreachable!()
    }

    fn fresh_crossing(&self, base: &str) -> String {
        let names: std::collections::BTreeSet<&String> =
            self.crossings.iter().map(|(n, _)| n).collect();
        if !names.contains(&base.to_string()) {
            return base.to_string();
        }
        for k in 2.. {
            let cand = format!("{base}.{k}");
            if !names.contains(&cand) {
                return cand;
            }
        }
        unreachable!()
    }

    /// Replaces one occurrence of the given arc end with a new reference.
    fn replace_end(&mut self, arc: &str, end: End, with: (String, End)) {
        for (_, slots) in &mut self.crossings {
            for s in slots.iter_mut() {
                if s.0 == arc && s.1 == end {
                    *s = with;
                    return;
                }
            }
        }
        for b in &mut self.boundary {
            if b.0 == arc && b.1 == end {
                *b = with;
                return;
            }
        }
        panic!("arc end {arc}:{end:?} not found");
    }

    /// Merges arc `q` into arc `p`: the strand ran ... -> p -> (deleted
    /// site) -> q -> ..., so q's head occurrence becomes p's head. When
    /// p == q the strand closes into a crossingless circle.
    fn splice(&mut self, p: &str, q: &str) {
        if p == q {
            self.free_unknots += 1;
            if self.mark.as_deref() == Some(p) {
                self.mark = None;
            }
            return;
        }
        self.replace_end(q, End::Head, (p.to_string(), End::Head));
        if self.mark.as_deref() == Some(q) {
            self.mark = Some(p.to_string());
        }
    }

    /// Resolves pending strand connections after deleting sites: each pair
    /// (p, q) says p's dangling head continues onto q's dangling tail.
    /// Chains are spliced from their downstream end; cycles close into free
    /// unknots.
    fn connect(&mut self, mut pairs: Vec<(String, String)>) {
        while !pairs.is_empty() {
            if let Some(pos) = pairs
                .iter()
                .position(|(_, t)| !pairs.iter().any(|(f, _)| f == t))
            {
                let (f, t) = pairs.remove(pos);
                self.splice(&f, &t);
                // Later pairs that continue onto f are unaffected: f's tail
                // still dangles, and targets are unique.
            } else {
                // A cycle of dangling pieces closes into one circle.
                let (f0, mut t) = pairs.remove(0);
                while t != f0 {
                    let pos = pairs
                        .iter()
                        .position(|(f, _)| *f == t)
                        .expect("cycle is closed");
                    if self.mark.as_deref() == Some(&t) {
                        self.mark = None;
                    }
                    let (_, t2) = pairs.remove(pos);
                    t = t2;
                }
                if self.mark.as_deref() == Some(&f0) {
                    self.mark = None;
                }
                self.free_unknots += 1;
            }
        }
    }

    fn build(&self) -> Result<ProjectiveDiagram, MoveError> {
        let mut order: Vec<String> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        let mut note = |a: &String| {
            if seen.insert(a.clone()) {
                order.push(a.clone());
            }
        };
        for (_, slots) in &self.crossings {
            for (a, _) in slots {
                note(a);
            }
        }
        for (a, _) in &self.boundary {
            note(a);
        }
        let index: BTreeMap<&String, usize> =
            order.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let to_ref = |(a, e): &(String, End)| crate::diagram::ArcRef {
            arc: index[a],
            end: *e,
        };
        let crossings = self
            .crossings
            .iter()
            .map(|(name, slots)| crate::diagram::CrossingSite {
                name: name.clone(),
                slots: [
                    to_ref(&slots[0]),
                    to_ref(&slots[1]),
                    to_ref(&slots[2]),
                    to_ref(&slots[3]),
                ],
                declared_sign: None,
            })
            .collect();
        let boundary = self.boundary.iter().map(|b| to_ref(b)).collect();
        let mark = self.mark.as_ref().map(|m| index[m]);
        let d = ProjectiveDiagram::from_parts(order, crossings, boundary, self.free_unknots, mark)
            .map_err(|e| MoveError::Broken(e.to_string()))?;
        if !is_planar(&d) {
            return Err(MoveError::Broken("rewiring lost planarity".into()));
        }
        Ok(d)
    }
}

fn arc_index(d: &ProjectiveDiagram, name: &str) -> Result<usize, MoveError> {
    d.arc_index(name)
        .ok_or_else(|| MoveError::NotApplicable(format!("no arc named {name}")))
}

fn crossing_index(d: &ProjectiveDiagram, name: &str) -> Result<usize, MoveError> {
    d.crossings()
        .iter()
        .position(|c| c.name == name)
        .ok_or_else(|| MoveError::NotApplicable(format!("no crossing named {name}")))
}

fn apply_r1_add(d: &ProjectiveDiagram, arc: &str, variant: u8) -> Result<ProjectiveDiagram, MoveError> {
    arc_index(d, arc)?;
    let mut p = Parts::from(d);
    let a2 = p.fresh_arc(&format!("{arc}k"));
    let l = p.fresh_arc(&format!("{arc}l"));
    let x = p.fresh_crossing("k");
    // Cut: the tail piece keeps the original name; a2 carries on to the old
    // head port.
    p.replace_end(arc, End::Head, (a2.clone(), End::Head));
    if p.mark.as_deref() == Some(arc) {
        // Keep the mark on the tail piece; either piece is on the same
        // component, so this is only a normalization.
    }
    let slots = match variant {
        0 => [
            (arc.to_string(), End::Head),
            (a2.clone(), End::Tail),
            (l.clone(), End::Tail),
            (l.clone(), End::Head),
        ],
        1 => [
            (arc.to_string(), End::Head),
            (l.clone(), End::Head),
            (l.clone(), End::Tail),
            (a2.clone(), End::Tail),
        ],
        2 => [
            (l.clone(), End::Head),
            (l.clone(), End::Tail),
            (a2.clone(), End::Tail),
            (arc.to_string(), End::Head),
        ],
        3 => [
            (l.clone(), End::Head),
            (arc.to_string(), End::Head),
            (a2.clone(), End::Tail),
            (l.clone(), End::Tail),
        ],
        _ => return nope("R1 variant out of range"),
    };
    p.crossings.push((x, slots));
    p.build()
}

fn apply_r1_remove(d: &ProjectiveDiagram, crossing: &str) -> Result<ProjectiveDiagram, MoveError> {
    let ci = crossing_index(d, crossing)?;
    let site = &d.crossings()[ci];
    // Find a loop arc occupying two adjacent slots.
    let mut loop_arc = None;
    for s in 0..4 {
        let a = site.slots[s];
        let b = site.slots[(s + 1) % 4];
        if a.arc == b.arc {
            loop_arc = Some((a.arc, s));
            break;
        }
    }
    let Some((l, s)) = loop_arc else {
        return nope(format!("crossing {crossing} carries no kink loop"));
    };
    // The loop must bound a monogon: one of its darts is alone on a face.
    let fs = faces(d);
    let lonely = [End::Head, End::Tail]
        .into_iter()
        .any(|e| fs.faces[fs.face_of(Dart { arc: l, end: e })].len() == 1);
    if !lonely {
        return nope(format!("kink loop at {crossing} is not empty"));
    }
    // The strand enters via the arc at one remaining slot and leaves via
    // the other.
    let other = [(s + 2) % 4, (s + 3) % 4];
    let (mut in_arc, mut out_arc) = (None, None);
    for o in other {
        let r = site.slots[o];
        match r.end {
            End::Head => in_arc = Some(r.arc),
            End::Tail => out_arc = Some(r.arc),
        }
    }
    let (Some(in_arc), Some(out_arc)) = (in_arc, out_arc) else {
        return nope("kink strand ends are inconsistent");
    };
    let mut p = Parts::from(d);
    let in_name = d.arc_name(in_arc).to_string();
    let out_name = d.arc_name(out_arc).to_string();
    p.crossings.remove(ci);
    p.splice(&in_name, &out_name);
    p.build()
}

/// Builds a crossing slot array from compass pieces: `pieces[k]` sits at
/// compass direction k (0 = N, 1 = W, 2 = S, 3 = E in the face-local frame
/// where the traced face lies to the walk's right), and `under_in` is the
/// compass direction of the incoming under strand. In that frame the
/// diagram's counterclockwise slot order reads N, E, S, W.
fn crossing_from_compass(
    pieces: [(String, End); 4],
    under_in: usize,
) -> [(String, End); 4] {
    let mut slots = Vec::with_capacity(4);
    for k in 0..4 {
        slots.push(pieces[(under_in + 4 - k) % 4].clone());
    }
    [
        slots[0].clone(),
        slots[1].clone(),
        slots[2].clone(),
        slots[3].clone(),
    ]
}

fn apply_r2_add(
    d: &ProjectiveDiagram,
    over: &str,
    over_end: End,
    under: &str,
    under_end: End,
) -> Result<ProjectiveDiagram, MoveError> {
    let a = arc_index(d, over)?;
    let b = arc_index(d, under)?;
    if a == b {
        return nope("R2 poke needs two distinct arcs");
    }
    let fs = faces(d);
    let da = Dart { arc: a, end: over_end };
    let db = Dart { arc: b, end: under_end };
    if fs.face_of(da) != fs.face_of(db) {
        return nope("arcs do not share a face on those sides");
    }
    // Local picture inside the shared face: the under arc runs left to
    // right along the walk, the over arc right to left on the opposite
    // wall; the finger of the over arc dips across the under arc, making
    // the left crossing X and right crossing Y.
    //
    // Pieces of the over strand (right to left): pr - f - pl; of the under
    // strand (left to right): qb_in - m - qb_out. The walk traverses an arc
    // from the dart's end, so the dart end names the side whose walk enters
    // there.
    let mut p = Parts::from(d);
    let f = p.fresh_arc(&format!("{over}f"));
    let m = p.fresh_arc(&format!("{under}m"));
    let a2 = p.fresh_arc(&format!("{over}p"));
    let b2 = p.fresh_arc(&format!("{under}p"));
    let x = p.fresh_crossing("p");
    let y = p.fresh_crossing(&format!("{x}y"));

    // Cut both arcs: the tail-side piece keeps the name.
    p.replace_end(over, End::Head, (a2.clone(), End::Head));
    p.replace_end(under, End::Head, (b2.clone(), End::Head));

    // Flow bookkeeping. For the over arc: walk direction is right-to-left;
    // the piece at the walk-entry side (the dart end) is on the right.
    // If over_end == Tail the strand flows with the walk (right to left),
    // so the tail piece (named `over`) is the right piece.
    let (o_right, o_left) = if over_end == End::Tail {
        (over.to_string(), a2.clone())
    } else {
        (a2.clone(), over.to_string())
    };
    // Under arc: walk direction left-to-right; entry piece on the left.
    let (u_left, u_right) = if under_end == End::Tail {
        (under.to_string(), b2.clone())
    } else {
        (b2.clone(), under.to_string())
    };
    // Flow directions: over flows right-to-left iff over_end == Tail.
    let o_rl = over_end == End::Tail;
    let u_lr = under_end == End::Tail;

    // Crossing Y (right): compass N = over's right piece, S = f, W = m,
    // E = under's right piece.
    let y_pieces: [(String, End); 4] = [
        (o_right.clone(), if o_rl { End::Head } else { End::Tail }),
        (m.clone(), if u_lr { End::Head } else { End::Tail }),
        (f.clone(), if o_rl { End::Tail } else { End::Head }),
        (u_right.clone(), if u_lr { End::Tail } else { End::Head }),
    ];
    let y_under_in = if u_lr { 1 } else { 3 };
    // Crossing X (left): N = over's left piece, S = f, W = under's left
    // piece, E = m.
    let x_pieces: [(String, End); 4] = [
        (o_left.clone(), if o_rl { End::Tail } else { End::Head }),
        (u_left.clone(), if u_lr { End::Head } else { End::Tail }),
        (f.clone(), if o_rl { End::Head } else { End::Tail }),
        (m.clone(), if u_lr { End::Tail } else { End::Head }),
    ];
    let x_under_in = if u_lr { 1 } else { 3 };

    p.crossings
        .push((x, crossing_from_compass(x_pieces, x_under_in)));
    p.crossings
        .push((y, crossing_from_compass(y_pieces, y_under_in)));
    p.build()
}

/// The two strand passages at a crossing: (slot of incoming end, slot of
/// outgoing end, arc in, arc out) for under (slots 0, 2) and over.
fn passages(d: &ProjectiveDiagram, ci: usize) -> [(usize, usize); 2] {
    let site = &d.crossings()[ci];
    let over_in = if site.slots[1].end == End::Head { 1 } else { 3 };
    [(0, 2), (over_in, (over_in + 2) % 4)]
}

fn apply_r2_remove(
    d: &ProjectiveDiagram,
    side_a: &str,
    side_b: &str,
) -> Result<ProjectiveDiagram, MoveError> {
    let f_arc = arc_index(d, side_a)?;
    let m_arc = arc_index(d, side_b)?;
    // Both arcs must run between the same two crossings, bound a bigon
    // face, and one strand must be over at both crossings.
    let fs = faces(d);
    let mut bigon = None;
    for ea in [End::Head, End::Tail] {
        let fa = fs.face_of(Dart { arc: f_arc, end: ea });
        let walk = &fs.faces[fa];
        if walk.len() == 2 && walk.iter().any(|dt| dt.arc == m_arc) && walk.iter().any(|dt| dt.arc == f_arc) {
            bigon = Some(());
            break;
        }
    }
    if bigon.is_none() {
        return nope("arcs do not bound a bigon face");
    }
    let ports = [
        port_of(d, Dart { arc: f_arc, end: End::Tail }),
        port_of(d, Dart { arc: f_arc, end: End::Head }),
    ];
    let (Port::Slot { crossing: cx, .. }, Port::Slot { crossing: cy, .. }) = (ports[0], ports[1])
    else {
        return nope("bigon side does not run between crossings");
    };
    if cx == cy {
        return nope("bigon at a single crossing is a kink, not a poke");
    }
    // m must also run between the same crossings.
    for e in [End::Head, End::Tail] {
        match port_of(d, Dart { arc: m_arc, end: e }) {
            Port::Slot { crossing, .. } if crossing == cx || crossing == cy => {}
            _ => return nope("second side does not join the same crossings"),
        }
    }
    // Over/under pattern: the strand of one side must be over at both
    // crossings and the other under at both.
    let over_at = |ci: usize, arc: usize| {
        let site = &d.crossings()[ci];
        let [_, (oin, oout)] = passages(d, ci);
        site.slots[oin].arc == arc || site.slots[oout].arc == arc
    };
    let f_over_x = over_at(cx, f_arc);
    let f_over_y = over_at(cy, f_arc);
    if f_over_x != f_over_y {
        return nope("clasp bigon: strands alternate over and under");
    }
    // Splice both strands across the deleted crossings: at each crossing,
    // the piece entering from outside connects to the piece leaving on the
    // same strand beyond the other crossing.
    let strand_outer = |ci: usize, inner: usize| -> Result<(usize, usize), MoveError> {
        // Returns (incoming outer arc, slot) .. actually (arc in, arc out)
        // for the strand through `ci` containing `inner`.
        let site = &d.crossings()[ci];
        for (sin, sout) in passages(d, ci) {
            if site.slots[sin].arc == inner || site.slots[sout].arc == inner {
                return Ok((site.slots[sin].arc, site.slots[sout].arc));
            }
        }
        nope("inner arc not found at crossing")
    };
    // Along the f-strand: ... -> in_f -> (X) -> f -> (Y) -> out_f -> ...
    // where f enters at one crossing and leaves at the other.
    let splice_pairs = |inner: usize| -> Result<(String, String), MoveError> {
        let head_port = port_of(d, Dart { arc: inner, end: End::Head });
        let tail_port = port_of(d, Dart { arc: inner, end: End::Tail });
        let (Port::Slot { crossing: c_head, .. }, Port::Slot { crossing: c_tail, .. }) =
            (head_port, tail_port)
        else {
            return nope("bigon side touches the boundary");
        };
        let (in_arc, _) = strand_outer(c_tail, inner)?;
        let (_, out_arc) = strand_outer(c_head, inner)?;
        Ok((
            d.arc_name(in_arc).to_string(),
            d.arc_name(out_arc).to_string(),
        ))
    };
    let (f_in, f_out) = splice_pairs(f_arc)?;
    let (m_in, m_out) = splice_pairs(m_arc)?;
    if [&f_in, &f_out, &m_in, &m_out]
        .iter()
        .any(|a| *a == d.arc_name(f_arc) || *a == d.arc_name(m_arc))
    {
        return nope("bigon strands immediately re-enter the bigon");
    }

    let mut p = Parts::from(d);
    let x_name = d.crossings()[cx].name.clone();
    let y_name = d.crossings()[cy].name.clone();
    p.crossings.retain(|(n, _)| *n != x_name && *n != y_name);
    p.connect(vec![(f_in, f_out), (m_in, m_out)]);
    p.build()
}

fn apply_r3(d: &ProjectiveDiagram, sides: &[String; 3]) -> Result<ProjectiveDiagram, MoveError> {
    let arcs: Vec<usize> = sides
        .iter()
        .map(|s| arc_index(d, s))
        .collect::<Result<_, _>>()?;
    let fs = faces(d);
    let f0 = fs.face_of(Dart { arc: arcs[0], end: End::Head });
    let f0b = fs.face_of(Dart { arc: arcs[0], end: End::Tail });
    let walk = [f0, f0b]
        .into_iter()
        .map(|f| &fs.faces[f])
        .find(|w| {
            w.len() == 3 && arcs.iter().all(|a| w.iter().any(|dt| dt.arc == *a))
        });
    let Some(_) = walk else {
        return nope("arcs do not bound a triangle face");
    };
    // Each side runs between two crossings; corners are the crossings.
    let mut side_ports = Vec::new();
    for &a in &arcs {
        let tp = port_of(d, Dart { arc: a, end: End::Tail });
        let hp = port_of(d, Dart { arc: a, end: End::Head });
        let (Port::Slot { crossing: ct, .. }, Port::Slot { crossing: ch, .. }) = (tp, hp) else {
            return nope("triangle side touches the boundary");
        };
        side_ports.push((a, ct, ch));
    }
    let mut corners: Vec<usize> = side_ports
        .iter()
        .flat_map(|(_, a, b)| [*a, *b])
        .collect();
    corners.sort_unstable();
    corners.dedup();
    if corners.len() != 3 {
        return nope("triangle corners are not three distinct crossings");
    }

    // Strand data at each corner: the two passages (in/out arcs), which is
    // over, and the sign.
    struct Passage {
        in_arc: usize,
        out_arc: usize,
        is_over: bool,
    }
    let mut corner_passages: BTreeMap<usize, Vec<Passage>> = BTreeMap::new();
    for &ci in &corners {
        let site = &d.crossings()[ci];
        let [(ui, uo), (oi, oo)] = passages(d, ci);
        corner_passages.insert(
            ci,
            vec![
                Passage {
                    in_arc: site.slots[ui].arc,
                    out_arc: site.slots[uo].arc,
                    is_over: false,
                },
                Passage {
                    in_arc: site.slots[oi].arc,
                    out_arc: site.slots[oo].arc,
                    is_over: true,
                },
            ],
        );
    }
    // The three strands, identified by their pair of triangle sides: each
    // strand passes two corners; at each corner it uses one side arc and
    // one outer arc.
    // Map each side arc to the two corners it joins.
    // Strand through corners (c1, c2) uses the side joining them.
    let side_between = |c1: usize, c2: usize| -> Option<usize> {
        side_ports
            .iter()
            .find(|(_, a, b)| (*a == c1 && *b == c2) || (*a == c2 && *b == c1))
            .map(|(s, _, _)| *s)
    };
    // Check the over/under pattern is not cyclic: count, per strand, how
    // often it is over at its two corners; the multiset must be {2,1,0}.
    let strand_over_count = |c1: usize, c2: usize| -> Result<usize, MoveError> {
        let side = side_between(c1, c2).ok_or_else(|| {
            MoveError::NotApplicable("missing triangle side".into())
        })?;
        let mut count = 0;
        for ci in [c1, c2] {
            for p in &corner_passages[&ci] {
                if p.in_arc == side || p.out_arc == side {
                    if p.is_over {
                        count += 1;
                    }
                }
            }
        }
        Ok(count)
    };
    let pairs = [
        (corners[0], corners[1]),
        (corners[0], corners[2]),
        (corners[1], corners[2]),
    ];
    let mut counts: Vec<usize> = pairs
        .iter()
        .map(|(a, b)| strand_over_count(*a, *b))
        .collect::<Result<_, _>>()?;
    counts.sort_unstable();
    if counts != vec![0, 1, 2] {
        return nope("triangle over/under pattern does not admit a slide");
    }

    // Rebuild each corner crossing: the side arcs stay between the same
    // corner pairs; each strand's outer attachment at this corner becomes
    // its outer attachment from the other corner, and the flow order of the
    // two corners along each strand swaps.
    let mut p = Parts::from(d);
    let name_of = |a: usize| d.arc_name(a).to_string();
    let side_set: std::collections::BTreeSet<usize> = arcs.iter().copied().collect();
    // For each corner, rebuild slots.
    let mut new_crossings: Vec<(String, [(String, End); 4])> = Vec::new();
    for &ci in &corners {
        let site = &d.crossings()[ci];
        let sign = d.sign(ci);
        // The two strands at this corner.
        let mut strand_specs = Vec::new();
        for pass in &corner_passages[&ci] {
            // Identify this strand's side arc at this corner and its outer
            // arc, plus whether the strand enters from the side.
            let (side_arc, _outer_arc, side_is_in) = if side_set.contains(&pass.in_arc) {
                (pass.in_arc, pass.out_arc, true)
            } else if side_set.contains(&pass.out_arc) {
                (pass.out_arc, pass.in_arc, false)
            } else {
                return nope("corner strand misses the triangle");
            };
            // The other corner of this strand: the side joins ci and cj.
            let (_, ca, cb) = side_ports.iter().find(|(s, _, _)| *s == side_arc).unwrap();
            let cj = if *ca == ci { *cb } else { *ca };
            // The strand's outer arc at the other corner (same strand, the
            // passage through cj containing side_arc).
            let other = corner_passages[&cj]
                .iter()
                .find(|q| q.in_arc == side_arc || q.out_arc == side_arc)
                .unwrap();
            let other_outer = if side_set.contains(&other.in_arc) {
                other.out_arc
            } else {
                other.in_arc
            };
            // After the slide the crossing order along the strand swaps:
            // if the strand used to enter this corner from outside
            // (outer -> side), it now exits to the outside here
            // (side -> other_outer), and vice versa.
            let (new_in, new_out) = if side_is_in {
                // Before: side in, outer out. After: the other corner's
                // outer comes in, side goes out.
                (other_outer, side_arc)
            } else {
                (side_arc, other_outer)
            };
            strand_specs.push((new_in, new_out, pass.is_over));
        }
        let (under, over): (Vec<_>, Vec<_>) =
            strand_specs.iter().partition(|(_, _, o)| !o);
        let (u_in, u_out, _) = under[0];
        let (o_in, o_out, _) = over[0];
        // Slots from sign: under-in at slot 1; over-in at slot 4 for
        // positive crossings, slot 2 for negative.
        let slots = if sign > 0 {
            [
                (name_of(u_in), End::Head),
                (name_of(o_out), End::Tail),
                (name_of(u_out), End::Tail),
                (name_of(o_in), End::Head),
            ]
        } else {
            [
                (name_of(u_in), End::Head),
                (name_of(o_in), End::Head),
                (name_of(u_out), End::Tail),
                (name_of(o_out), End::Tail),
            ]
        };
        new_crossings.push((site.name.clone(), slots));
    }
    for (name, slots) in new_crossings {
        let pos = p.crossings.iter().position(|(n, _)| *n == name).unwrap();
        p.crossings[pos] = (name, slots);
    }
    // Reverse each side arc's orientation bookkeeping if needed: sides keep
    // their endpoints' ends, which the rebuild above preserved by always
    // writing side arcs with matching head/tail roles.
    p.build()
}

fn apply_r4(d: &ProjectiveDiagram, crossing: &str) -> Result<ProjectiveDiagram, MoveError> {
    let ci = crossing_index(d, crossing)?;
    let site = &d.crossings()[ci];
    if d.boundary().is_empty() {
        return nope("no wall passages to slide through");
    }
    // Find adjacent slots whose arcs both run straight to consecutive
    // boundary positions, bounding a length-2 face with the corner at this
    // crossing.
    let fs = faces(d);
    let mut found = None;
    for s in 0..4 {
        let u = site.slots[s];
        let w = site.slots[(s + 1) % 4];
        if u.arc == w.arc {
            continue;
        }
        let up = port_of(d, Dart { arc: u.arc, end: u.end.flip() });
        let wp = port_of(d, Dart { arc: w.arc, end: w.end.flip() });
        let (Port::Boundary { position: qu }, Port::Boundary { position: qw }) = (up, wp) else {
            continue;
        };
        let nb = d.boundary().len();
        if (qu + 1) % nb != qw && (qw + 1) % nb != qu {
            continue;
        }
        // The corner face between the two slots must be exactly the two
        // wall arcs.
        let corner_face = fs.face_of(Dart { arc: w.arc, end: w.end });
        let walk = &fs.faces[corner_face];
        if walk.len() == 2
            && walk.iter().any(|dt| dt.arc == u.arc)
            && walk.iter().any(|dt| dt.arc == w.arc)
        {
            found = Some((s, u, w, qu, qw));
            break;
        }
        let corner_face = fs.face_of(Dart { arc: u.arc, end: u.end });
        let walk = &fs.faces[corner_face];
        if walk.len() == 2
            && walk.iter().any(|dt| dt.arc == u.arc)
            && walk.iter().any(|dt| dt.arc == w.arc)
        {
            found = Some((s, u, w, qu, qw));
            break;
        }
    }
    let Some((s, u, w, qu, qw)) = found else {
        return nope(format!("crossing {crossing} is not wall-adjacent"));
    };

    // Strand data: u sits at slot s, its far continuation at slot s+2; w at
    // s+1 with continuation at s+3.
    let fu = site.slots[(s + 2) % 4];
    let fw = site.slots[(s + 3) % 4];
    // Whether each strand flows into the wall on this side.
    let u_into_wall = u.end == End::Tail; // u leaves the crossing toward the wall
    let w_into_wall = w.end == End::Tail;
    // Which strand is under at X: slots (0,2) hold the under strand.
    let u_is_under = s == 0 || s == 2;
    let sign = d.sign(ci);

    // Continuations on the far side of the wall.
    let au = d.antipode(qu);
    let aw = d.antipode(qw);
    let cu = d.boundary()[au];
    let cw = d.boundary()[aw];

    let mut p = Parts::from(d);
    let u_name = d.arc_name(u.arc).to_string();
    let w_name = d.arc_name(w.arc).to_string();
    let fu_name = d.arc_name(fu.arc).to_string();
    let fw_name = d.arc_name(fw.arc).to_string();
    let cu_name = d.arc_name(cu.arc).to_string();
    let cw_name = d.arc_name(cw.arc).to_string();
    let nu = p.fresh_arc(&format!("{u_name}w"));
    let nw = p.fresh_arc(&format!("{w_name}w"));
    let x_new = p.fresh_crossing(&format!("{crossing}w"));

    // Remove the old crossing; drop arcs u and w entirely.
    p.crossings.remove(ci);

    // Near side: fu extends to the boundary at q_w (positions swap), fw to
    // q_u. The boundary flags match the strand flow: if the strand flowed
    // into the wall, the new boundary end is where its head arrives.
    // fu's loose end previously sat at the crossing with u's strand; the
    // strand piece fu keeps its name and gains a boundary end.
    // Replace boundary entries.
    let fu_flag = if u_into_wall { End::Head } else { End::Tail };
    let fw_flag = if w_into_wall { End::Head } else { End::Tail };
    // fu's end at the removed crossing: opposite flag.
    // (If the strand flows into the wall, fu arrived at the crossing with
    // its head there; that end now continues to the wall, so the head
    // moves to the boundary.)
    p.boundary[qw] = (fu_name.clone(), fu_flag);
    p.boundary[qu] = (fw_name.clone(), fw_flag);

    // Far side: new wall arcs nu (at aw) and nw (at au) into the new
    // crossing, connecting to the old continuations cu, cw.
    let nu_bflag = fu_flag.flip();
    let nw_bflag = fw_flag.flip();
    p.boundary[aw] = (nu.clone(), nu_bflag);
    p.boundary[au] = (nw.clone(), nw_bflag);

    // New crossing: strand-of-u passes through (nu, cu), strand-of-w
    // through (nw, cw); over/under exchange, sign preserved.
    // Incoming ends at the new crossing follow flow: if strand-of-u flowed
    // into the wall on the near side it flows out of the wall on the far
    // side, arriving at the new crossing via nu.
    let (su_in, su_out): ((String, End), (String, End)) = if u_into_wall {
        ((nu.clone(), End::Head), (cu_name.clone(), End::Tail))
    } else {
        ((cu_name.clone(), End::Head), (nu.clone(), End::Tail))
    };
    let (sw_in, sw_out): ((String, End), (String, End)) = if w_into_wall {
        ((nw.clone(), End::Head), (cw_name.clone(), End::Tail))
    } else {
        ((cw_name.clone(), End::Head), (nw.clone(), End::Tail))
    };
    // cu / cw keep their boundary-far ends but their wall ends move to the
    // new crossing; update those occurrences.
    // cu's end at position au was (cu, some end) - it has been overwritten
    // above; reattach that end at the new crossing instead.
    // The end of cu that sat on the wall is cu.end.
    // We already replaced the boundary entries, so just make sure the
    // crossing slots below reference the right ends.
    let u_under_after = !u_is_under; // over/under exchange
    let (under_in, under_out, over_in, over_out) = if u_under_after {
        (su_in, su_out, sw_in, sw_out)
    } else {
        (sw_in, sw_out, su_in, su_out)
    };
    let slots = if sign > 0 {
        [under_in, over_out, under_out, over_in]
    } else {
        [under_in, over_in, under_out, over_out]
    };
    p.crossings.push((x_new, slots));

    // cu's and cw's wall-side ends must now appear exactly once in the new
    // crossing; their old boundary occurrences were overwritten. Dangling
    // checks in build() verify this.
    let _ = (u_name, w_name);
    p.build()
}

fn apply_r5_add(
    d: &ProjectiveDiagram,
    arc: &str,
    end: End,
    gap: usize,
) -> Result<ProjectiveDiagram, MoveError> {
    let a = arc_index(d, arc)?;
    let k = d.wall_passages();
    if k > 0 {
        let fs = faces(d);
        let nb = d.boundary().len();
        if gap >= nb {
            return nope("gap index out of range");
        }
        // The face seeing the wall gap after `gap` is the one whose walk
        // leaves the boundary along the arc at that position.
        let gap_arc = d.boundary()[gap];
        let gap_face = fs.face_of(Dart {
            arc: gap_arc.arc,
            end: gap_arc.end,
        });
        if fs.face_of(Dart { arc: a, end }) != gap_face {
            return nope("arc side does not face that wall gap");
        }
    }
    let mut p = Parts::from(d);
    let a2 = p.fresh_arc(&format!("{arc}w"));
    let cap = p.fresh_arc(&format!("{arc}c"));
    // Cut the arc; the tail piece keeps the name and dives through the
    // wall: a (tail..) -> P1 ~ Q1 -> cap -> Q2 ~ P2 -> a2 (..head).
    p.replace_end(arc, End::Head, (a2.clone(), End::Head));
    let p1 = (arc.to_string(), End::Head);
    let p2 = (a2.clone(), End::Tail);
    let q1 = (cap.clone(), End::Tail);
    let q2 = (cap.clone(), End::Head);
    if k == 0 {
        p.boundary = vec![p1, p2, q1, q2];
    } else {
        let old = p.boundary.clone();
        let n = old.len();
        let mut new = Vec::with_capacity(n + 4);
        for (i, entry) in old.iter().enumerate() {
            new.push(entry.clone());
            if i == gap {
                new.push(p1.clone());
                new.push(p2.clone());
            }
            if i == (gap + k) % n {
                new.push(q1.clone());
                new.push(q2.clone());
            }
        }
        // When gap + k wraps past the end the cap pair lands before the
        // passage pair in cyclic order; the construction above inserts both
        // after their anchors, which preserves the antipodal pairing
        // because the word is cyclic.
        p.boundary = new;
    }
    p.build()
}

fn apply_r5_remove(d: &ProjectiveDiagram, cap: &str) -> Result<ProjectiveDiagram, MoveError> {
    let c = arc_index(d, cap)?;
    let tp = port_of(d, Dart { arc: c, end: End::Tail });
    let hp = port_of(d, Dart { arc: c, end: End::Head });
    let (Port::Boundary { position: pt }, Port::Boundary { position: ph }) = (tp, hp) else {
        return nope("cap arc does not span the wall");
    };
    let nb = d.boundary().len();
    if (pt + 1) % nb != ph && (ph + 1) % nb != pt {
        return nope("cap ends are not consecutive on the boundary");
    }
    let (q, q1) = if (pt + 1) % nb == ph { (pt, ph) } else { (ph, pt) };
    // Continuations at the antipodal positions.
    let aq = d.antipode(q);
    let aq1 = d.antipode(q1);
    if aq == q || aq == q1 || aq1 == q || aq1 == q1 {
        return nope("arc through antipodal positions is an essential core, not a cap");
    }
    let x = d.boundary()[aq];
    let y = d.boundary()[aq1];
    // The strand flows ... x -> (wall) -> cap -> (wall) -> y ... in one of
    // the two directions; splice tail-side into head-side.
    let (from, to) = match (x.end, y.end) {
        (End::Head, End::Tail) => (x.arc, y.arc),
        (End::Tail, End::Head) => (y.arc, x.arc),
        _ => return nope("cap continuations are inconsistent"),
    };
    let mut p = Parts::from(d);
    let from = d.arc_name(from).to_string();
    let to = d.arc_name(to).to_string();
    let mut drop = vec![q, q1, aq, aq1];
    drop.sort_unstable();
    for (k, pos) in drop.iter().enumerate() {
        p.boundary.remove(pos - k);
    }
    p.splice(&from, &to);
    p.build()
}

/// Applies one move.
pub fn apply(d: &ProjectiveDiagram, m: &Move) -> Result<ProjectiveDiagram, MoveError> {
    match m {
        Move::R1Add { arc, variant } => apply_r1_add(d, arc, *variant),
        Move::R1Remove { crossing } => apply_r1_remove(d, crossing),
        Move::R2Add {
            over,
            over_end,
            under,
            under_end,
        } => apply_r2_add(d, over, *over_end, under, *under_end),
        Move::R2Remove { side_a, side_b } => apply_r2_remove(d, side_a, side_b),
        Move::R3 { sides } => apply_r3(d, sides),
        Move::R4 { crossing } => apply_r4(d, crossing),
        Move::R5Add { arc, end, gap } => apply_r5_add(d, arc, *end, *gap),
        Move::R5Remove { cap } => apply_r5_remove(d, cap),
    }
}

/// Applies a whole script.
pub fn apply_script(
    d: &ProjectiveDiagram,
    script: &MoveScript,
) -> Result<ProjectiveDiagram, MoveError> {
    let mut cur = d.clone();
    for m in &script.moves {
        cur = apply(&cur, m)?;
    }
    Ok(cur)
}

/// Enumerates applicable move sites (bounded, deterministic order).
pub fn applicable_moves(d: &ProjectiveDiagram, allow_growth: bool) -> Vec<Move> {
    let mut out = Vec::new();
    let fs = faces(d);
    let arc_name = |a: usize| d.arc_name(a).to_string();

    if allow_growth {
        for a in 0..d.arc_count() {
            for variant in 0..4u8 {
                out.push(Move::R1Add {
                    arc: arc_name(a),
                    variant,
                });
            }
        }
        // R2 pokes: distinct arcs sharing a face.
        for walk in &fs.faces {
            for i in 0..walk.len() {
                for j in 0..walk.len() {
                    if i == j || walk[i].arc == walk[j].arc {
                        continue;
                    }
                    out.push(Move::R2Add {
                        over: arc_name(walk[i].arc),
                        over_end: walk[i].end,
                        under: arc_name(walk[j].arc),
                        under_end: walk[j].end,
                    });
                }
            }
        }
        // R5 pushes.
        if d.wall_passages() == 0 {
            for a in 0..d.arc_count() {
                out.push(Move::R5Add {
                    arc: arc_name(a),
                    end: End::Tail,
                    gap: 0,
                });
            }
        } else {
            for gap in 0..d.boundary().len() {
                let ga = d.boundary()[gap];
                let gap_face = fs.face_of(Dart {
                    arc: ga.arc,
                    end: ga.end,
                });
                for dart in &fs.faces[gap_face] {
                    out.push(Move::R5Add {
                        arc: arc_name(dart.arc),
                        end: dart.end,
                        gap,
                    });
                }
            }
        }
    }

    // Shrinking / neutral moves.
    for (ci, site) in d.crossings().iter().enumerate() {
        // R1 removals.
        for s in 0..4 {
            if site.slots[s].arc == site.slots[(s + 1) % 4].arc {
                let l = site.slots[s].arc;
                let lonely = [End::Head, End::Tail].into_iter().any(|e| {
                    fs.faces[fs.face_of(Dart { arc: l, end: e })].len() == 1
                });
                if lonely {
                    out.push(Move::R1Remove {
                        crossing: site.name.clone(),
                    });
                    break;
                }
            }
        }
        // R4 slides.
        if apply_r4(d, &site.name).is_ok() {
            out.push(Move::R4 {
                crossing: site.name.clone(),
            });
        }
        let _ = ci;
    }
    for walk in &fs.faces {
        match walk.len() {
            1 => {
                // Cap retraction.
                let a = walk[0].arc;
                if matches!(d.head_port(a), Port::Boundary { .. })
                    && matches!(d.tail_port(a), Port::Boundary { .. })
                {
                    out.push(Move::R5Remove { cap: arc_name(a) });
                }
            }
            2 => {
                let (a, b) = (walk[0].arc, walk[1].arc);
                if a != b {
                    let m = Move::R2Remove {
                        side_a: arc_name(a),
                        side_b: arc_name(b),
                    };
                    if apply_r2_remove(d, &arc_name(a), &arc_name(b)).is_ok() {
                        out.push(m);
                    }
                }
            }
            3 => {
                let sides = [walk[0].arc, walk[1].arc, walk[2].arc];
                if sides[0] != sides[1] && sides[0] != sides[2] && sides[1] != sides[2] {
                    let names = [arc_name(sides[0]), arc_name(sides[1]), arc_name(sides[2])];
                    if apply_r3(d, &names).is_ok() {
                        out.push(Move::R3 { sides: names });
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Generates and applies a reproducible random move script.
///
/// Growth moves are excluded once the diagram reaches `max_crossings`
/// crossings (or 3 * max arcs), so homology stays computable.
pub fn random_script(
    d: &ProjectiveDiagram,
    seed: u64,
    count: usize,
    max_crossings: usize,
) -> (MoveScript, ProjectiveDiagram) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = d.clone();
    let mut script = MoveScript::default();
    for _ in 0..count {
        // R2 adds two crossings, so growth stops early enough to respect
        // the cap; R5 growth is bounded through the arc count.
        let allow_growth =
            cur.crossing_count() + 2 <= max_crossings && cur.arc_count() < 4 * max_crossings;
        let moves = applicable_moves(&cur, allow_growth);
        if moves.is_empty() {
            break;
        }
        // A few tries in case a listed site fails its finer checks.
        let mut applied = false;
        for _ in 0..8 {
            let m = &moves[rng.random_range(0..moves.len())];
            if let Ok(next) = apply(&cur, m) {
                debug_assert!(next.validate().is_empty());
                cur = next;
                script.moves.push(m.clone());
                applied = true;
                break;
            }
        }
        if !applied {
            break;
        }
    }
    (script, cur)
}
