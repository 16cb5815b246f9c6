//! Chain maps for elementary cobordisms (births, deaths, saddles), movie
//! composition, 2-colouring propagation and Euler-characteristic
//! bookkeeping.
//!
//! Births, deaths and saddles leave the crossing set untouched, so the
//! cubes of the two diagrams share their vertex set and the induced map is
//! assembled per smoothing: a birth inserts v_+ on the new circle (sheet
//! preserved), a death applies the counit to the dying circle, and a saddle
//! applies m, delta or eta according to how the surgery changes the
//! smoothing's circles. Reidemeister events participate in movies for
//! colouring propagation and Euler characteristic only; chain-level
//! equivalences for them are out of scope and composition rejects them.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::colouring::{enumerate_two_colourings, shadow_segments, TwoColouring};
use crate::cube::{build_cube, Smoothing, SmoothingIndex};
use crate::diagram::{parse_diagram, DiagramError, End, ProjectiveDiagram};
use crate::exactalg::{Scalar, SparseMatrix};
use crate::moves::{self, Move};
use crate::theories::{
    theory_tables, DoubledGenerator, DoubledLayout, Sheet, TheoryTag,
};

/// One elementary cobordism event, applied to the current diagram.
///
/// Saddle sites name arcs, or free unknots as `@k` (the k-th declared
/// crossingless circle); equal sites pinch off a new circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventSpec {
    /// Birth of a crossingless, unlinked, nullhomotopic circle.
    Birth,
    /// Death of the k-th free unknot.
    Death { unknot: usize },
    /// Oriented saddle joining the two named sites.
    Saddle { a: String, b: String },
    /// A Reidemeister move; allowed in movies, rejected by chain-map
    /// composition.
    Rmove(Move),
}

/// A saddle endpoint: an arc or a free unknot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SaddleSite {
    Arc(usize),
    Unknot(usize),
}

fn saddle_site(d: &ProjectiveDiagram, name: &str) -> Result<SaddleSite, CobordismError> {
    if let Some(rest) = name.strip_prefix('@') {
        let k: usize = rest
            .parse()
            .map_err(|_| CobordismError::InvalidEvent(format!("bad unknot site {name}")))?;
        if k >= d.free_unknots() {
            return bad(format!("no free unknot #{k}"));
        }
        return Ok(SaddleSite::Unknot(k));
    }
    d.arc_index(name)
        .map(SaddleSite::Arc)
        .ok_or_else(|| CobordismError::InvalidEvent(format!("no arc named {name}")))
}

impl EventSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            EventSpec::Birth => "birth",
            EventSpec::Death { .. } => "death",
            EventSpec::Saddle { .. } => "saddle",
            EventSpec::Rmove(_) => "rmove",
        }
    }
}

#[derive(Debug, Error)]
pub enum CobordismError {
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("movie contains a Reidemeister event; chain maps for moves are not built")]
    UnsupportedEvent,
    #[error(transparent)]
    Move(#[from] moves::MoveError),
    #[error(transparent)]
    Theory(#[from] crate::theories::TheoryError),
    #[error("movie parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("checkpoint mismatch after event {index}")]
    Checkpoint { index: usize },
}

fn bad<T>(msg: impl Into<String>) -> Result<T, CobordismError> {
    Err(CobordismError::InvalidEvent(msg.into()))
}

/// Applies an event to a diagram.
pub fn apply_event(
    d: &ProjectiveDiagram,
    event: &EventSpec,
) -> Result<ProjectiveDiagram, CobordismError> {
    match event {
        EventSpec::Birth => {
            let text = format!("{}unknot 1\n", d.serialize());
            Ok(parse_diagram(&text)?)
        }
        EventSpec::Death { unknot } => {
            if *unknot >= d.free_unknots() {
                return bad(format!("no free unknot #{unknot}"));
            }
            let mut text = String::new();
            for line in d.serialize().lines() {
                if let Some(rest) = line.strip_prefix("unknot ") {
                    let n: usize = rest.trim().parse().unwrap();
                    if n > 1 {
                        text.push_str(&format!("unknot {}\n", n - 1));
                    }
                } else {
                    text.push_str(line);
                    text.push('\n');
                }
            }
            Ok(parse_diagram(&text)?)
        }
        EventSpec::Saddle { a, b } => apply_saddle(d, a, b),
        EventSpec::Rmove(m) => Ok(moves::apply(d, m)?),
    }
}

/// Oriented saddle: for distinct arcs, swapping their head attachments is
/// the surgery that respects both orientations; the arcs must share a face.
/// A site saddled with itself pinches off a crossingless circle; a saddle
/// with a free unknot absorbs it into the strand.
fn apply_saddle(
    d: &ProjectiveDiagram,
    a: &str,
    b: &str,
) -> Result<ProjectiveDiagram, CobordismError> {
    let sa = saddle_site(d, a)?;
    let sb = saddle_site(d, b)?;
    match (sa, sb) {
        (SaddleSite::Unknot(i), SaddleSite::Unknot(j)) => {
            if i == j {
                // Pinch a circle off a circle: one more free unknot.
                let text = format!("{}unknot 1\n", d.serialize());
                return Ok(parse_diagram(&text)?);
            }
            // Merge two free circles: one fewer.
            apply_event(d, &EventSpec::Death { unknot: i.max(j) })
        }
        (SaddleSite::Arc(_), SaddleSite::Unknot(k))
        | (SaddleSite::Unknot(k), SaddleSite::Arc(_)) => {
            // The strand absorbs the circle; the diagram only loses the
            // free unknot.
            apply_event(d, &EventSpec::Death { unknot: k })
        }
        (SaddleSite::Arc(ai), SaddleSite::Arc(bi)) => {
            if ai == bi {
                // Pinch: both band ends sit side by side on one side of the
                // arc, so no face condition arises.
                let text = format!("{}unknot 1\n", d.serialize());
                return Ok(parse_diagram(&text)?);
            }
            let fs = moves::faces(d);
            // The saddle band lives in a face both arcs border; arcs in
            // disjoint pieces of the diagram are positionally free and can
            // always be brought together. Orientation consistency of the
            // head swap is certified by planarity of the result.
            let pieces = moves::graph_pieces(d);
            let cofacial = pieces[ai] != pieces[bi]
                || [End::Head, End::Tail].into_iter().any(|ea| {
                    [End::Head, End::Tail].into_iter().any(|eb| {
                        fs.face_of(moves::Dart { arc: ai, end: ea })
                            == fs.face_of(moves::Dart { arc: bi, end: eb })
                    })
                });
            if !cofacial {
                return bad(format!("arcs {a} and {b} do not share a face"));
            }
            // Swap head occurrences in the serialized text, then revalidate.
            let mut lines = Vec::new();
            for line in d.serialize().lines() {
                let mut words: Vec<String> =
                    line.split_whitespace().map(|w| w.to_string()).collect();
                if matches!(
                    words.first().map(|s| s.as_str()),
                    Some("crossing") | Some("boundary")
                ) {
                    for w in words.iter_mut().skip(1) {
                        if *w == format!("{a}:h") {
                            *w = format!("{b}:h");
                        } else if *w == format!("{b}:h") {
                            *w = format!("{a}:h");
                        }
                    }
                }
                lines.push(words.join(" "));
            }
            let out = parse_diagram(&format!("{}\n", lines.join("\n")))?;
            if !moves::is_planar(&out) {
                return bad(format!(
                    "saddle between {a} and {b} is not orientation-consistent here"
                ));
            }
            Ok(out)
        }
    }
}

/// A movie: a start diagram and a sequence of events. Intermediate
/// diagrams are produced by compilation.
#[derive(Debug, Clone)]
pub struct Movie {
    pub start: ProjectiveDiagram,
    pub events: Vec<EventSpec>,
    /// Optional expected diagrams after given events (by event index).
    pub checkpoints: Vec<(usize, ProjectiveDiagram)>,
}

impl Movie {
    /// All frames, starting with `start`; validates checkpoints.
    pub fn frames(&self) -> Result<Vec<ProjectiveDiagram>, CobordismError> {
        let mut frames = vec![self.start.clone()];
        for (i, e) in self.events.iter().enumerate() {
            let next = apply_event(frames.last().unwrap(), e)?;
            for (ci, expect) in &self.checkpoints {
                if *ci == i && expect != &next {
                    return Err(CobordismError::Checkpoint { index: i });
                }
            }
            frames.push(next);
        }
        Ok(frames)
    }

    pub fn births(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, EventSpec::Birth)).count()
    }

    pub fn deaths(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, EventSpec::Death { .. }))
            .count()
    }

    pub fn saddles(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, EventSpec::Saddle { .. }))
            .count()
    }

    /// Euler characteristic of the traced surface.
    pub fn euler_characteristic(&self) -> i64 {
        self.births() as i64 + self.deaths() as i64 - self.saddles() as i64
    }

    /// Genus, defined for a connected cobordism between two knots with
    /// even, nonpositive Euler characteristic.
    pub fn genus(&self) -> Result<i64, CobordismError> {
        let frames = self.frames()?;
        let first = frames.first().unwrap();
        let last = frames.last().unwrap();
        if first.components().len() != 1 || last.components().len() != 1 {
            return bad("genus needs knots at both ends");
        }
        if !self.is_connected()? {
            return bad("genus of a disconnected cobordism is undefined here");
        }
        let chi = self.euler_characteristic();
        if chi > 0 || chi % 2 != 0 {
            return bad(format!("Euler characteristic {chi} does not give a genus"));
        }
        Ok(-chi / 2)
    }

    /// Whether the traced surface is connected, via a union-find over
    /// (frame, component) nodes.
    pub fn is_connected(&self) -> Result<bool, CobordismError> {
        let frames = self.frames()?;
        // Node id: (frame, component index in frame).
        let comp_count: Vec<usize> = frames.iter().map(|f| f.components().len()).collect();
        let offset: Vec<usize> = comp_count
            .iter()
            .scan(0, |acc, c| {
                let o = *acc;
                *acc += c;
                Some(o)
            })
            .collect();
        let total: usize = comp_count.iter().sum();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let union = |p: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(p, a), find(p, b));
            if ra != rb {
                p[ra] = rb;
            }
        };
        for (t, e) in self.events.iter().enumerate() {
            let before = &frames[t];
            let after = &frames[t + 1];
            let bc = before.components();
            let ac = after.components();
            let arcs_of = |d: &ProjectiveDiagram, c: &crate::diagram::ComponentInfo| {
                c.arcs
                    .iter()
                    .map(|a| d.arc_name(*a).to_string())
                    .collect::<BTreeSet<String>>()
            };
            // Component index helpers.
            let comp_of_arc = |d: &ProjectiveDiagram,
                               comps: &[crate::diagram::ComponentInfo],
                               name: &str|
             -> usize {
                comps
                    .iter()
                    .position(|c| arcs_of(d, c).contains(name))
                    .expect("arc belongs to a component")
            };
            let comp_of_unknot =
                |d: &ProjectiveDiagram, comps: &[crate::diagram::ComponentInfo], k: usize| {
                    comps.len() - d.free_unknots() + k
                };

            // Which free unknot (if any) disappears, and extra unions tying
            // saddled pieces together.
            let mut dying_unknot: Option<usize> = None;
            let mut extra: Vec<(usize, usize)> = Vec::new();
            match e {
                EventSpec::Death { unknot } => dying_unknot = Some(*unknot),
                EventSpec::Saddle { a, b } => {
                    let sa = saddle_site(before, a).expect("frames compiled");
                    let sb = saddle_site(before, b).expect("frames compiled");
                    match (sa, sb) {
                        (SaddleSite::Arc(_), SaddleSite::Arc(_)) if a == b => {
                            extra.push((
                                comp_of_arc(before, &bc, a),
                                comp_of_unknot(after, &ac, after.free_unknots() - 1),
                            ));
                        }
                        (SaddleSite::Arc(_), SaddleSite::Arc(_)) => {}
                        (SaddleSite::Arc(_), SaddleSite::Unknot(k))
                        | (SaddleSite::Unknot(k), SaddleSite::Arc(_)) => {
                            dying_unknot = Some(k);
                            let arc_name = if sa == SaddleSite::Unknot(k) { b } else { a };
                            extra.push((
                                comp_of_unknot(before, &bc, k),
                                comp_of_arc(after, &ac, arc_name),
                            ));
                        }
                        (SaddleSite::Unknot(i), SaddleSite::Unknot(j)) if i == j => {
                            extra.push((
                                comp_of_unknot(before, &bc, i),
                                comp_of_unknot(after, &ac, after.free_unknots() - 1),
                            ));
                        }
                        (SaddleSite::Unknot(i), SaddleSite::Unknot(j)) => {
                            let (lo, hi) = (i.min(j), i.max(j));
                            dying_unknot = Some(hi);
                            extra.push((
                                comp_of_unknot(before, &bc, hi),
                                comp_of_unknot(after, &ac, lo),
                            ));
                        }
                    }
                }
                _ => {}
            }

            let mut before_unknot_pos = 0usize;
            for (bi_c, bcomp) in bc.iter().enumerate() {
                let b_node = offset[t] + bi_c;
                if bcomp.arcs.is_empty() {
                    let k = before_unknot_pos;
                    before_unknot_pos += 1;
                    if dying_unknot == Some(k) {
                        continue;
                    }
                    let after_k = match dying_unknot {
                        Some(dk) if k > dk => k - 1,
                        _ => k,
                    };
                    union(
                        &mut parent,
                        b_node,
                        offset[t + 1] + comp_of_unknot(after, &ac, after_k),
                    );
                    continue;
                }
                // Arc-carrying components persist (or merge/split) sharing
                // arc names with their afterimages.
                let names = arcs_of(before, bcomp);
                for (ai_c, acomp) in ac.iter().enumerate() {
                    let anames = arcs_of(after, acomp);
                    if names.intersection(&anames).next().is_some() {
                        union(&mut parent, b_node, offset[t + 1] + ai_c);
                    }
                }
            }
            for (bcomp, acomp) in extra {
                union(&mut parent, offset[t] + bcomp, offset[t + 1] + acomp);
            }
        }
        let root0 = find(&mut parent, 0);
        Ok((0..total).all(|x| find(&mut parent, x) == root0))
    }
}

/// Builds the chain map of one non-Reidemeister event for a theory, as one
/// sparse matrix per homological degree.
pub struct EventChainMap<T: Scalar> {
    pub min_degree: i64,
    pub maps: Vec<SparseMatrix<T>>,
    /// Declared filtered degree: +1 for birth and death, -1 for a saddle.
    pub degree: i64,
}

pub fn event_chain_map<T: Scalar>(
    before: &ProjectiveDiagram,
    after: &ProjectiveDiagram,
    event: &EventSpec,
    theory: TheoryTag,
) -> Result<EventChainMap<T>, CobordismError> {
    if matches!(event, EventSpec::Rmove(_)) {
        return Err(CobordismError::UnsupportedEvent);
    }
    let cube_b = build_cube(before).map_err(crate::theories::TheoryError::from)?;
    let cube_a = build_cube(after).map_err(crate::theories::TheoryError::from)?;
    let layout_b = DoubledLayout::from_cube(&cube_b, before.writhe());
    let layout_a = DoubledLayout::from_cube(&cube_a, after.writhe());
    assert_eq!(before.crossing_count(), after.crossing_count());
    let tables = theory_tables(theory);
    let n = before.crossing_count();

    let degrees: Vec<i64> = layout_b.degrees().collect();
    let mut maps = Vec::with_capacity(degrees.len());
    for &deg in &degrees {
        maps.push(SparseMatrix::<T>::zero(layout_a.dim(deg), layout_b.dim(deg)));
    }

    for mask in 0..1u64 << n {
        let idx = SmoothingIndex::new(mask as u32, n);
        let sb = cube_b.vertex(idx);
        let sa = cube_a.vertex(idx);
        let deg_pos = (sb.height - layout_b.min_degree) as usize;
        let entries = vertex_map::<T>(before, after, sb, sa, event, &tables)?;
        for (g_in, g_out, coeff) in entries {
            let col = layout_b.index_of(&g_in);
            let row = layout_a.index_of(&g_out);
            maps[deg_pos].add_entry(row, col, coeff);
        }
    }
    Ok(EventChainMap {
        min_degree: layout_b.min_degree,
        maps,
        degree: match event {
            EventSpec::Saddle { .. } => -1,
            _ => 1,
        },
    })
}

type VertexEntries<T> = Vec<(DoubledGenerator, DoubledGenerator, T)>;

/// Per-smoothing block of an event map.
///
/// Circles correspond across the event by arc-name sets (arc names persist
/// through births, deaths and saddles) and free circles by index; the
/// affected circles receive the birth unit, the death counit, or the
/// merge/split/eta saddle block per the circle-count change.
fn vertex_map<T: Scalar>(
    before: &ProjectiveDiagram,
    after: &ProjectiveDiagram,
    sb: &Smoothing,
    sa: &Smoothing,
    event: &EventSpec,
    tables: &crate::theories::Tables,
) -> Result<VertexEntries<T>, CobordismError> {
    let names = |d: &ProjectiveDiagram, c: &crate::cube::Circle| -> BTreeSet<String> {
        c.arcs.iter().map(|a| d.arc_name(*a).to_string()).collect()
    };
    let free_b: Vec<usize> = sb
        .circles
        .iter()
        .enumerate()
        .filter(|(_, c)| c.arcs.is_empty())
        .map(|(p, _)| p)
        .collect();
    let free_a: Vec<usize> = sa
        .circles
        .iter()
        .enumerate()
        .filter(|(_, c)| c.arcs.is_empty())
        .map(|(p, _)| p)
        .collect();
    let circle_of_arc = |d: &ProjectiveDiagram, s: &Smoothing, name: &str| -> usize {
        s.circles
            .iter()
            .position(|c| names(d, c).contains(name))
            .expect("arc lies on a circle")
    };

    // Affected circle positions on each side, the per-side kind, and which
    // free unknot (if any) disappears from the bystander matching.
    enum Kind {
        Birth,
        Death,
        Merge,
        Split,
        Eta,
    }
    let (affected_b, affected_a, kind, dying_free): (Vec<usize>, Vec<usize>, Kind, Option<usize>) =
        match event {
            EventSpec::Birth => (vec![], vec![*free_a.last().unwrap()], Kind::Birth, None),
            EventSpec::Death { unknot } => {
                (vec![free_b[*unknot]], vec![], Kind::Death, Some(*unknot))
            }
            EventSpec::Saddle { a, b } => {
                let site_a = saddle_site(before, a).expect("validated event");
                let site_b = saddle_site(before, b).expect("validated event");
                match (site_a, site_b) {
                    (SaddleSite::Arc(_), SaddleSite::Arc(_)) if a == b => {
                        // Pinch: the circle through `a` splits off the new
                        // free circle.
                        let cb = circle_of_arc(before, sb, a);
                        let ca = circle_of_arc(after, sa, a);
                        (
                            vec![cb],
                            vec![ca, *free_a.last().unwrap()],
                            Kind::Split,
                            None,
                        )
                    }
                    (SaddleSite::Arc(_), SaddleSite::Arc(_)) => {
                        let ca_b = circle_of_arc(before, sb, a);
                        let cb_b = circle_of_arc(before, sb, b);
                        let mut bs = vec![ca_b, cb_b];
                        bs.sort_unstable();
                        bs.dedup();
                        let ca_a = circle_of_arc(after, sa, a);
                        let cb_a = circle_of_arc(after, sa, b);
                        let mut as_ = vec![ca_a, cb_a];
                        as_.sort_unstable();
                        as_.dedup();
                        let kind = match (bs.len(), as_.len()) {
                            (2, 1) => Kind::Merge,
                            (1, 2) => Kind::Split,
                            (1, 1) => Kind::Eta,
                            other => {
                                return bad(format!(
                                    "saddle changed circle counts impossibly: {other:?}"
                                ))
                            }
                        };
                        (bs, as_, kind, None)
                    }
                    (SaddleSite::Arc(_), SaddleSite::Unknot(k))
                    | (SaddleSite::Unknot(k), SaddleSite::Arc(_)) => {
                        let arc_name = if site_a == SaddleSite::Unknot(k) { b } else { a };
                        let cb = circle_of_arc(before, sb, arc_name);
                        let ca = circle_of_arc(after, sa, arc_name);
                        (vec![cb, free_b[k]], vec![ca], Kind::Merge, Some(k))
                    }
                    (SaddleSite::Unknot(i), SaddleSite::Unknot(j)) if i == j => (
                        vec![free_b[i]],
                        vec![free_a[i], *free_a.last().unwrap()],
                        Kind::Split,
                        None,
                    ),
                    (SaddleSite::Unknot(i), SaddleSite::Unknot(j)) => {
                        let (lo, hi) = (i.min(j), i.max(j));
                        (
                            vec![free_b[lo], free_b[hi]],
                            vec![free_a[lo]],
                            Kind::Merge,
                            Some(hi),
                        )
                    }
                }
            }
            EventSpec::Rmove(_) => unreachable!(),
        };

    // Bystander correspondence: arc circles by name sets, free circles by
    // index with the dying one skipped.
    let mb = sb.circle_count();
    let mut from_to: Vec<Option<usize>> = vec![None; mb];
    for (pb, cb) in sb.circles.iter().enumerate() {
        if affected_b.contains(&pb) || cb.arcs.is_empty() {
            continue;
        }
        let nb = names(before, cb);
        let pa = sa
            .circles
            .iter()
            .position(|ca| names(after, ca) == nb)
            .expect("bystander circle persists");
        from_to[pb] = Some(pa);
    }
    for (k, pb) in free_b.iter().enumerate() {
        if affected_b.contains(pb) {
            continue;
        }
        let ka = match dying_free {
            Some(dk) if k > dk => k - 1,
            _ => k,
        };
        from_to[*pb] = Some(free_a[ka]);
    }

    let carry = |labels: u32, fill: &mut u32| {
        for (pb, target) in from_to.iter().enumerate() {
            if let Some(pa) = target {
                if labels >> pb & 1 == 1 {
                    *fill |= 1 << pa;
                }
            }
        }
    };

    let mut out: VertexEntries<T> = Vec::new();
    for labels in 0..1u32 << mb {
        for sheet in [Sheet::Upper, Sheet::Lower] {
            let g_in = DoubledGenerator {
                vertex: sb.index,
                labels,
                sheet,
            };
            let label = |pos: usize| labels >> pos & 1 == 1;
            let push = |out_labels: u32, out_sheet: Sheet, coeff: i64, out: &mut VertexEntries<T>| {
                let c = T::from_i64(coeff);
                if !c.is_zero() {
                    out.push((
                        g_in,
                        DoubledGenerator {
                            vertex: sa.index,
                            labels: out_labels,
                            sheet: out_sheet,
                        },
                        c,
                    ));
                }
            };
            match kind {
                Kind::Birth => {
                    let mut ol = 0u32;
                    carry(labels, &mut ol);
                    // New circle gets v_+ (label bit 0).
                    push(ol, sheet, 1, &mut out);
                }
                Kind::Death => {
                    if label(affected_b[0]) {
                        let mut ol = 0u32;
                        carry(labels, &mut ol);
                        push(ol, sheet, 1, &mut out);
                    }
                }
                Kind::Merge => {
                    for (tl, coeff) in
                        (tables.merge)(label(affected_b[0]), label(affected_b[1]))
                    {
                        let mut ol = 0u32;
                        carry(labels, &mut ol);
                        if *tl {
                            ol |= 1 << affected_a[0];
                        }
                        push(ol, sheet, *coeff, &mut out);
                    }
                }
                Kind::Split => {
                    for ((la, lb), coeff) in (tables.split)(label(affected_b[0])) {
                        let mut ol = 0u32;
                        carry(labels, &mut ol);
                        if *la {
                            ol |= 1 << affected_a[0];
                        }
                        if *lb {
                            ol |= 1 << affected_a[1];
                        }
                        push(ol, sheet, *coeff, &mut out);
                    }
                }
                Kind::Eta => {
                    for ((new_sheet, tl), coeff) in (tables.eta)(sheet, label(affected_b[0])) {
                        let mut ol = 0u32;
                        carry(labels, &mut ol);
                        if *tl {
                            ol |= 1 << affected_a[0];
                        }
                        push(ol, *new_sheet, *coeff, &mut out);
                    }
                }
            }
        }
    }
    Ok(out)
}


/// Composite chain map of a movie (one matrix per homological degree),
/// together with its filtered degree, which equals the movie's Euler
/// characteristic.
pub fn compose_movie<T: Scalar>(
    movie: &Movie,
    theory: TheoryTag,
) -> Result<EventChainMap<T>, CobordismError> {
    if movie.events.iter().any(|e| matches!(e, EventSpec::Rmove(_))) {
        return Err(CobordismError::UnsupportedEvent);
    }
    let frames = movie.frames()?;
    let cube0 = build_cube(&frames[0]).map_err(crate::theories::TheoryError::from)?;
    let layout0 = DoubledLayout::from_cube(&cube0, frames[0].writhe());
    let degrees: Vec<i64> = layout0.degrees().collect();
    let mut acc: Option<EventChainMap<T>> = None;
    for (i, e) in movie.events.iter().enumerate() {
        let step = event_chain_map::<T>(&frames[i], &frames[i + 1], e, theory)?;
        acc = Some(match acc {
            None => step,
            Some(prev) => {
                let maps = prev
                    .maps
                    .iter()
                    .zip(step.maps.iter())
                    .map(|(f, g)| g.matmul(f))
                    .collect();
                EventChainMap {
                    min_degree: prev.min_degree,
                    maps,
                    degree: prev.degree + step.degree,
                }
            }
        });
    }
    Ok(acc.unwrap_or_else(|| {
        // Empty movie: identity on the start complex.
        EventChainMap {
            min_degree: layout0.min_degree,
            maps: degrees
                .iter()
                .map(|d| SparseMatrix::identity(layout0.dim(*d)))
                .collect(),
            degree: 0,
        }
    }))
}

/// Colourings of the after-diagram that agree with `c` away from the event
/// site. Births have two extensions; saddles have one exactly when the two
/// arcs share a colour; Reidemeister moves always propagate.
pub fn propagate_colouring(
    before: &ProjectiveDiagram,
    after: &ProjectiveDiagram,
    event: &EventSpec,
    c: &TwoColouring,
) -> Vec<TwoColouring> {
    let seg_b = shadow_segments(before);
    let seg_a = shadow_segments(after);
    let site_segment = |site: &str| -> usize {
        match saddle_site(before, site).expect("validated event") {
            SaddleSite::Arc(a) => seg_b[a],
            SaddleSite::Unknot(k) => before.arc_count() + k,
        }
    };
    // A saddle propagates only when the two site strands share a colour.
    let mut pinch_colour = None;
    if let EventSpec::Saddle { a, b } = event {
        let col_a = c.colour_of_segment(site_segment(a));
        let col_b = c.colour_of_segment(site_segment(b));
        if col_a != col_b {
            return Vec::new();
        }
        if a == b {
            // The pinched circle inherits its parent's colour.
            pinch_colour = Some(col_a);
        }
    }
    // Colours persist on every arc present on both sides: the event site is
    // a small disc, and a saddle's equal-coloured band keeps the colour of
    // the strands it joins. Arcs existing on only one side (inside an
    // R-move site) carry no constraint.
    let touched: BTreeSet<String> = {
        let before_names: BTreeSet<String> = (0..before.arc_count())
            .map(|a| before.arc_name(a).to_string())
            .collect();
        let after_names: BTreeSet<String> = (0..after.arc_count())
            .map(|a| after.arc_name(a).to_string())
            .collect();
        before_names
            .symmetric_difference(&after_names)
            .cloned()
            .collect()
    };
    let mut out = Vec::new();
    for cand in enumerate_two_colourings(after) {
        let mut agree = true;
        for arc_b in 0..before.arc_count() {
            let name = before.arc_name(arc_b);
            if touched.contains(name) {
                continue;
            }
            let Some(arc_a) = after.arc_index(name) else {
                continue;
            };
            let col_b = c.colour_of_segment(seg_b[arc_b]);
            let col_a = cand.colour_of_segment(seg_a[arc_a]);
            if col_b != col_a {
                agree = false;
                break;
            }
        }
        // Persisting free unknots keep their colours (they match by index;
        // the newborn circle of a birth is free, of a pinch constrained).
        if agree {
            let newborn = match event {
                EventSpec::Birth => Some(after.free_unknots() - 1),
                EventSpec::Saddle { a, b } if a == b => Some(after.free_unknots() - 1),
                _ => None,
            };
            let dying = match event {
                EventSpec::Death { unknot } => Some(*unknot),
                EventSpec::Saddle { a, b } if a != b => {
                    match (
                        saddle_site(before, a).unwrap(),
                        saddle_site(before, b).unwrap(),
                    ) {
                        (SaddleSite::Unknot(i), SaddleSite::Unknot(j)) => Some(i.max(j)),
                        (SaddleSite::Unknot(k), _) | (_, SaddleSite::Unknot(k)) => Some(k),
                        _ => None,
                    }
                }
                _ => None,
            };
            for k in 0..before.free_unknots() {
                if dying == Some(k) {
                    continue;
                }
                let ka = match dying {
                    Some(dk) if k > dk => k - 1,
                    _ => k,
                };
                if Some(ka) == newborn {
                    continue;
                }
                let col_b = c.colour_of_segment(before.arc_count() + k);
                let col_a = cand.colour_of_segment(after.arc_count() + ka);
                if col_b != col_a {
                    agree = false;
                    break;
                }
            }
        }
        if agree {
            if let Some(pc) = pinch_colour {
                let newborn_seg = after.arc_count() + after.free_unknots() - 1;
                if cand.colour_of_segment(newborn_seg) != pc {
                    continue;
                }
            }
            out.push(cand);
        }
    }
    out
}

/// True when some colouring of the first diagram propagates through every
/// event.
pub fn movie_two_colourable(movie: &Movie) -> Result<bool, CobordismError> {
    let frames = movie.frames()?;
    let mut live = enumerate_two_colourings(&frames[0]);
    for (i, e) in movie.events.iter().enumerate() {
        let mut next = Vec::new();
        for c in &live {
            for propagated in propagate_colouring(&frames[i], &frames[i + 1], e, c) {
                if !next.contains(&propagated) {
                    next.push(propagated);
                }
            }
        }
        live = next;
        if live.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Movie text format:
///
/// ```text
/// begin diagram
///   <diagram lines>
/// end
/// birth
/// death <free-unknot-index>
/// saddle <arc> <arc>
/// rmove r1+ <arc> <variant>      (similarly r1-, r2+, r2-, r3, r4, r5+, r5-)
/// checkpoint
///   <diagram lines>
/// end
/// ```
pub fn parse_movie(text: &str) -> Result<Movie, CobordismError> {
    let mut start: Option<ProjectiveDiagram> = None;
    let mut events: Vec<EventSpec> = Vec::new();
    let mut checkpoints = Vec::new();
    let mut block: Option<(bool, Vec<String>)> = None; // (is_checkpoint, lines)
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some((is_checkpoint, lines)) = &mut block {
            if content == "end" {
                let d = parse_diagram(&format!("{}\n", lines.join("\n")))?;
                if *is_checkpoint {
                    if events.is_empty() {
                        return Err(CobordismError::Parse {
                            line,
                            message: "checkpoint before any event".into(),
                        });
                    }
                    checkpoints.push((events.len() - 1, d));
                } else {
                    start = Some(d);
                }
                block = None;
            } else {
                lines.push(content.to_string());
            }
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        let parse_end = |w: &str| match w {
            "h" => Ok(End::Head),
            "t" => Ok(End::Tail),
            other => Err(CobordismError::Parse {
                line,
                message: format!("expected h or t, found {other}"),
            }),
        };
        match words[0] {
            "begin" => block = Some((false, Vec::new())),
            "checkpoint" => block = Some((true, Vec::new())),
            "birth" => events.push(EventSpec::Birth),
            "death" => {
                let unknot = words
                    .get(1)
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| CobordismError::Parse {
                        line,
                        message: "death takes a free-unknot index".into(),
                    })?;
                events.push(EventSpec::Death { unknot });
            }
            "saddle" => {
                if words.len() != 3 {
                    return Err(CobordismError::Parse {
                        line,
                        message: "saddle takes two arc names".into(),
                    });
                }
                events.push(EventSpec::Saddle {
                    a: words[1].to_string(),
                    b: words[2].to_string(),
                });
            }
            "rmove" => {
                let m = match words.get(1).copied() {
                    Some("r1+") if words.len() == 4 => Move::R1Add {
                        arc: words[2].into(),
                        variant: words[3].parse().map_err(|_| CobordismError::Parse {
                            line,
                            message: "bad r1+ variant".into(),
                        })?,
                    },
                    Some("r1-") if words.len() == 3 => Move::R1Remove {
                        crossing: words[2].into(),
                    },
                    Some("r2+") if words.len() == 6 => Move::R2Add {
                        over: words[2].into(),
                        over_end: parse_end(words[3])?,
                        under: words[4].into(),
                        under_end: parse_end(words[5])?,
                    },
                    Some("r2-") if words.len() == 4 => Move::R2Remove {
                        side_a: words[2].into(),
                        side_b: words[3].into(),
                    },
                    Some("r3") if words.len() == 5 => Move::R3 {
                        sides: [words[2].into(), words[3].into(), words[4].into()],
                    },
                    Some("r4") if words.len() == 3 => Move::R4 {
                        crossing: words[2].into(),
                    },
                    Some("r5+") if words.len() == 5 => Move::R5Add {
                        arc: words[2].into(),
                        end: parse_end(words[3])?,
                        gap: words[4].parse().map_err(|_| CobordismError::Parse {
                            line,
                            message: "bad r5+ gap".into(),
                        })?,
                    },
                    Some("r5-") if words.len() == 3 => Move::R5Remove {
                        cap: words[2].into(),
                    },
                    _ => {
                        return Err(CobordismError::Parse {
                            line,
                            message: format!("bad rmove line: {content}"),
                        })
                    }
                };
                events.push(EventSpec::Rmove(m));
            }
            other => {
                return Err(CobordismError::Parse {
                    line,
                    message: format!("unknown movie directive {other}"),
                });
            }
        }
    }
    let start = start.ok_or(CobordismError::Parse {
        line: 0,
        message: "movie has no start diagram".into(),
    })?;
    Ok(Movie {
        start,
        events,
        checkpoints,
    })
}
