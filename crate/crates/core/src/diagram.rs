//! Link diagrams in RP^3: a tangle in a disk whose 2k boundary endpoints are
//! identified antipodally (position i with position i + k).
//!
//! The text format is line oriented with `#` comments:
//!
//! ```text
//! crossing <id> <arc>:h|t <arc>:h|t <arc>:h|t <arc>:h|t
//! boundary <arc>:h|t ... <arc>:h|t
//! unknot <n>
//! mark <arc>
//! sign <crossing-id> <+|->
//! ```
//!
//! Crossing slots are listed counterclockwise starting at the incoming
//! under-strand end, so the under-strand passes slot 1 -> slot 3 and the
//! derived sign is +1 exactly when the incoming over-strand is slot 4.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Head ends arrive at a site, tail ends leave one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum End {
    Head,
    Tail,
}

impl End {
    pub fn flip(self) -> End {
        match self {
            End::Head => End::Tail,
            End::Tail => End::Head,
        }
    }
}

/// One end of an arc. Arcs are referred to by dense internal index; the
/// original name is kept in [`ProjectiveDiagram::arc_name`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcRef {
    pub arc: usize,
    pub end: End,
}

/// A crossing site with its four slots in counterclockwise order starting at
/// the incoming under-strand end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingSite {
    pub name: String,
    pub slots: [ArcRef; 4],
    pub declared_sign: Option<i8>,
}

impl CrossingSite {
    /// +1 when the incoming over-strand enters at slot 4 (index 3).
    pub fn derived_sign(&self) -> Option<i8> {
        let h1 = self.slots[1].end == End::Head;
        let h3 = self.slots[3].end == End::Head;
        match (h1, h3) {
            (false, true) => Some(1),
            (true, false) => Some(-1),
            _ => None,
        }
    }
}

/// Where an arc end sits: a crossing slot or a boundary position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    Slot { crossing: usize, slot: usize },
    Boundary { position: usize },
}

/// A link component traced through crossings and the antipodal
/// identification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentInfo {
    pub component_id: usize,
    /// Arcs in traversal order; empty for a crossingless free circle.
    pub arcs: Vec<usize>,
    /// Number of boundary endpoints on this component (two per passage
    /// through the projective wall).
    pub boundary_passages: usize,
    pub self_crossings: usize,
    pub mixed_crossings: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationCode {
    DanglingArcEnd,
    DuplicateArcEnd,
    OrientationViolation,
    SignMismatch,
    AntipodalViolation,
    OddBoundary,
    UnknownMark,
}

/// A failed diagram invariant, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub entity: String,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("{line}:{col}: syntax error [{code}]: {message}")]
    Syntax {
        line: usize,
        col: usize,
        code: &'static str,
        message: String,
    },
    #[error("invalid diagram: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| format!("[{:?}] {}", v.code, v.message))
        .collect::<Vec<_>>()
        .join("; ")
}

/// A validated tangle diagram in a disk with antipodally identified boundary
/// endpoints; the single source of truth for all computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectiveDiagram {
    arc_names: Vec<String>,
    crossings: Vec<CrossingSite>,
    boundary: Vec<ArcRef>,
    free_unknots: usize,
    mark: Option<usize>,
    /// Port of each arc's head and tail, filled during validation.
    head_port: Vec<Port>,
    tail_port: Vec<Port>,
}

impl ProjectiveDiagram {
    pub fn from_parts(
        arc_names: Vec<String>,
        crossings: Vec<CrossingSite>,
        boundary: Vec<ArcRef>,
        free_unknots: usize,
        mark: Option<usize>,
    ) -> Result<Self, DiagramError> {
        let mut d = ProjectiveDiagram {
            head_port: vec![Port::Boundary { position: usize::MAX }; arc_names.len()],
            tail_port: vec![Port::Boundary { position: usize::MAX }; arc_names.len()],
            arc_names,
            crossings,
            boundary,
            free_unknots,
            mark,
        };
        let violations = d.check();
        if !violations.is_empty() {
            return Err(DiagramError::Invalid(violations));
        }
        d.index_ports();
        Ok(d)
    }

    pub fn arc_count(&self) -> usize {
        self.arc_names.len()
    }

    pub fn arc_name(&self, arc: usize) -> &str {
        &self.arc_names[arc]
    }

    pub fn arc_index(&self, name: &str) -> Option<usize> {
        self.arc_names.iter().position(|n| n == name)
    }

    pub fn crossings(&self) -> &[CrossingSite] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn boundary(&self) -> &[ArcRef] {
        &self.boundary
    }

    /// Number of antipodal endpoint pairs (passages through the wall).
    pub fn wall_passages(&self) -> usize {
        self.boundary.len() / 2
    }

    pub fn antipode(&self, position: usize) -> usize {
        let k = self.wall_passages();
        (position + k) % (2 * k)
    }

    pub fn free_unknots(&self) -> usize {
        self.free_unknots
    }

    pub fn mark(&self) -> Option<usize> {
        self.mark
    }

    pub fn head_port(&self, arc: usize) -> Port {
        self.head_port[arc]
    }

    pub fn tail_port(&self, arc: usize) -> Port {
        self.tail_port[arc]
    }

    /// The arc end sitting at a port.
    pub fn at_port(&self, port: Port) -> ArcRef {
        match port {
            Port::Slot { crossing, slot } => self.crossings[crossing].slots[slot],
            Port::Boundary { position } => self.boundary[position],
        }
    }

    pub fn sign(&self, crossing: usize) -> i8 {
        self.crossings[crossing]
            .derived_sign()
            .expect("validated crossing has a derived sign")
    }

    pub fn writhe(&self) -> i64 {
        (0..self.crossings.len())
            .map(|c| self.sign(c) as i64)
            .sum()
    }

    pub fn negative_crossings(&self) -> usize {
        (0..self.crossings.len())
            .filter(|c| self.sign(*c) < 0)
            .count()
    }

    /// True when the diagram does not meet the boundary of the ambient disk.
    pub fn is_local(&self) -> bool {
        self.boundary.is_empty()
    }

    fn index_ports(&mut self) {
        for (ci, c) in self.crossings.iter().enumerate() {
            for (si, r) in c.slots.iter().enumerate() {
                let port = Port::Slot {
                    crossing: ci,
                    slot: si,
                };
                match r.end {
                    End::Head => self.head_port[r.arc] = port,
                    End::Tail => self.tail_port[r.arc] = port,
                }
            }
        }
        for (pos, r) in self.boundary.iter().enumerate() {
            let port = Port::Boundary { position: pos };
            match r.end {
                End::Head => self.head_port[r.arc] = port,
                End::Tail => self.tail_port[r.arc] = port,
            }
        }
    }

    /// All invariant violations; empty exactly when the diagram is valid.
    pub fn validate(&self) -> Vec<Violation> {
        self.check()
    }

    fn check(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut head_count = vec![0usize; self.arc_names.len()];
        let mut tail_count = vec![0usize; self.arc_names.len()];
        {
            let mut record = |r: &ArcRef| match r.end {
                End::Head => head_count[r.arc] += 1,
                End::Tail => tail_count[r.arc] += 1,
            };
            for c in &self.crossings {
                for r in &c.slots {
                    record(r);
                }
            }
            for r in &self.boundary {
                record(r);
            }
        }
        for (arc, (h, t)) in head_count.iter().zip(tail_count.iter()).enumerate() {
            if *h != 1 || *t != 1 {
                let code = if *h == 0 || *t == 0 {
                    ViolationCode::DanglingArcEnd
                } else {
                    ViolationCode::DuplicateArcEnd
                };
                out.push(Violation {
                    code,
                    entity: self.arc_names[arc].clone(),
                    message: format!(
                        "arc {} has {} head and {} tail occurrences",
                        self.arc_names[arc], h, t
                    ),
                });
            }
        }
        for c in &self.crossings {
            if c.slots[0].end != End::Head || c.slots[2].end != End::Tail {
                out.push(Violation {
                    code: ViolationCode::OrientationViolation,
                    entity: c.name.clone(),
                    message: format!(
                        "crossing {}: under-strand must arrive at slot 1 and leave at slot 3",
                        c.name
                    ),
                });
            }
            match c.derived_sign() {
                None => out.push(Violation {
                    code: ViolationCode::OrientationViolation,
                    entity: c.name.clone(),
                    message: format!(
                        "crossing {}: exactly one of slots 2, 4 must be the incoming over-strand",
                        c.name
                    ),
                }),
                Some(s) => {
                    if let Some(decl) = c.declared_sign {
                        if decl != s {
                            out.push(Violation {
                                code: ViolationCode::SignMismatch,
                                entity: c.name.clone(),
                                message: format!(
                                    "crossing {}: declared sign {} but derived {}",
                                    c.name, decl, s
                                ),
                            });
                        }
                    }
                }
            }
        }
        if self.boundary.len() % 2 != 0 {
            out.push(Violation {
                code: ViolationCode::OddBoundary,
                entity: "boundary".into(),
                message: "boundary word must have an even number of endpoints".into(),
            });
        } else {
            let k = self.boundary.len() / 2;
            for i in 0..k {
                let a = &self.boundary[i];
                let b = &self.boundary[i + k];
                if a.end == b.end {
                    out.push(Violation {
                        code: ViolationCode::AntipodalViolation,
                        entity: format!("positions {} and {}", i, i + k),
                        message: format!(
                            "antipodal positions {} and {} must carry one head and one tail",
                            i,
                            i + k
                        ),
                    });
                }
            }
        }
        if let Some(m) = self.mark {
            if m >= self.arc_names.len() {
                out.push(Violation {
                    code: ViolationCode::UnknownMark,
                    entity: format!("arc #{m}"),
                    message: "marked arc does not exist".into(),
                });
            }
        }
        out
    }

    /// The port from which the strand continues after arriving at `port`.
    ///
    /// Arriving at a crossing slot, the strand leaves through the opposite
    /// slot; arriving at the boundary, it continues from the antipodal
    /// position.
    pub fn continuation(&self, port: Port) -> Port {
        match port {
            Port::Slot { crossing, slot } => Port::Slot {
                crossing,
                slot: (slot + 2) % 4,
            },
            Port::Boundary { position } => Port::Boundary {
                position: self.antipode(position),
            },
        }
    }

    /// Link components (not connected components of the shadow in RP^2).
    pub fn components(&self) -> Vec<ComponentInfo> {
        let arc_component = self.arc_components();
        let n_comp = arc_component.iter().copied().max().map_or(0, |m| m + 1);
        let mut infos: Vec<ComponentInfo> = (0..n_comp)
            .map(|component_id| ComponentInfo {
                component_id,
                arcs: Vec::new(),
                boundary_passages: 0,
                self_crossings: 0,
                mixed_crossings: 0,
            })
            .collect();

        let mut seen = vec![false; self.arc_count()];
        for start in 0..self.arc_count() {
            if seen[start] {
                continue;
            }
            let comp = arc_component[start];
            let mut arc = start;
            loop {
                seen[arc] = true;
                infos[comp].arcs.push(arc);
                let next_port = self.continuation(self.head_port(arc));
                let next = self.at_port(next_port).arc;
                if next == start {
                    break;
                }
                arc = next;
            }
        }
        for r in &self.boundary {
            infos[arc_component[r.arc]].boundary_passages += 1;
        }
        for c in &self.crossings {
            let under = arc_component[c.slots[0].arc];
            let over = arc_component[c.slots[1].arc];
            if under == over {
                infos[under].self_crossings += 1;
            } else {
                infos[under].mixed_crossings += 1;
                infos[over].mixed_crossings += 1;
            }
        }
        for _ in 0..self.free_unknots {
            let component_id = infos.len();
            infos.push(ComponentInfo {
                component_id,
                arcs: Vec::new(),
                boundary_passages: 0,
                self_crossings: 0,
                mixed_crossings: 0,
            });
        }
        infos
    }

    /// Component index of each arc, numbered by smallest contained arc.
    pub fn arc_components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.arc_count()];
        let mut next = 0;
        for start in 0..self.arc_count() {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut arc = start;
            loop {
                comp[arc] = next;
                let next_port = self.continuation(self.head_port(arc));
                arc = self.at_port(next_port).arc;
                if arc == start {
                    break;
                }
            }
            next += 1;
        }
        comp
    }

    /// Components whose 2-colouring parity constraint is inconsistent:
    /// exactly those sharing an odd number of crossing passages with the
    /// rest of the link.
    pub fn degenerate_components(&self) -> Vec<usize> {
        self.components()
            .iter()
            .filter(|c| c.mixed_crossings % 2 == 1)
            .map(|c| c.component_id)
            .collect()
    }

    /// Canonical text form; parsing it reproduces this diagram.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let fmt_ref = |r: &ArcRef| {
            format!(
                "{}:{}",
                self.arc_names[r.arc],
                match r.end {
                    End::Head => "h",
                    End::Tail => "t",
                }
            )
        };
        for c in &self.crossings {
            let slots: Vec<String> = c.slots.iter().map(&fmt_ref).collect();
            writeln!(out, "crossing {} {}", c.name, slots.join(" ")).unwrap();
        }
        if !self.boundary.is_empty() {
            let entries: Vec<String> = self.boundary.iter().map(&fmt_ref).collect();
            writeln!(out, "boundary {}", entries.join(" ")).unwrap();
        }
        if self.free_unknots > 0 {
            writeln!(out, "unknot {}", self.free_unknots).unwrap();
        }
        if let Some(m) = self.mark {
            writeln!(out, "mark {}", self.arc_names[m]).unwrap();
        }
        for c in &self.crossings {
            if let Some(s) = c.declared_sign {
                writeln!(out, "sign {} {}", c.name, if s > 0 { "+" } else { "-" }).unwrap();
            }
        }
        out
    }
}

/// Parses the diagram text format and validates the result.
pub fn parse_diagram(text: &str) -> Result<ProjectiveDiagram, DiagramError> {
    let mut arc_names: Vec<String> = Vec::new();
    let mut arc_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut crossings: Vec<CrossingSite> = Vec::new();
    let mut boundary: Vec<ArcRef> = Vec::new();
    let mut free_unknots = 0usize;
    let mut mark_name: Option<(String, usize)> = None;
    let mut signs: Vec<(String, i8, usize)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let col_of = |tok: &str| raw.find(tok).map(|c| c + 1).unwrap_or(1);
        let mut words = content.split_whitespace();
        let keyword = words.next().unwrap();
        let rest: Vec<&str> = words.collect();
        let mut parse_ref = |tok: &str| -> Result<ArcRef, DiagramError> {
            let (name, end) = tok.rsplit_once(':').ok_or_else(|| DiagramError::Syntax {
                line,
                col: col_of(tok),
                code: "BAD_ARC_REF",
                message: format!("expected <arc>:h or <arc>:t, found {tok:?}"),
            })?;
            let end = match end {
                "h" => End::Head,
                "t" => End::Tail,
                other => {
                    return Err(DiagramError::Syntax {
                        line,
                        col: col_of(tok),
                        code: "BAD_ARC_END",
                        message: format!("arc end must be h or t, found {other:?}"),
                    })
                }
            };
            if name.is_empty() {
                return Err(DiagramError::Syntax {
                    line,
                    col: col_of(tok),
                    code: "BAD_ARC_REF",
                    message: "empty arc name".into(),
                });
            }
            let arc = match arc_index.get(name) {
                Some(i) => *i,
                None => {
                    let i = arc_names.len();
                    arc_names.push(name.to_string());
                    arc_index.insert(name.to_string(), i);
                    i
                }
            };
            Ok(ArcRef { arc, end })
        };
        match keyword {
            "crossing" => {
                if rest.len() != 5 {
                    return Err(DiagramError::Syntax {
                        line,
                        col: 1,
                        code: "BAD_CROSSING",
                        message: format!(
                            "crossing takes an id and 4 slots, found {} fields",
                            rest.len()
                        ),
                    });
                }
                let name = rest[0].to_string();
                if crossings.iter().any(|c| c.name == name) {
                    return Err(DiagramError::Syntax {
                        line,
                        col: col_of(rest[0]),
                        code: "DUPLICATE_CROSSING",
                        message: format!("crossing {name} already defined"),
                    });
                }
                let mut slots = Vec::with_capacity(4);
                for tok in &rest[1..] {
                    slots.push(parse_ref(tok)?);
                }
                crossings.push(CrossingSite {
                    name,
                    slots: [slots[0], slots[1], slots[2], slots[3]],
                    declared_sign: None,
                });
            }
            "boundary" => {
                if !boundary.is_empty() {
                    return Err(DiagramError::Syntax {
                        line,
                        col: 1,
                        code: "DUPLICATE_BOUNDARY",
                        message: "boundary already defined".into(),
                    });
                }
                for tok in &rest {
                    boundary.push(parse_ref(tok)?);
                }
            }
            "unknot" => {
                let n: usize = rest
                    .first()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| DiagramError::Syntax {
                        line,
                        col: 1,
                        code: "BAD_UNKNOT",
                        message: "unknot takes a nonnegative count".into(),
                    })?;
                free_unknots += n;
            }
            "mark" => {
                let name = rest.first().ok_or_else(|| DiagramError::Syntax {
                    line,
                    col: 1,
                    code: "BAD_MARK",
                    message: "mark takes an arc name".into(),
                })?;
                mark_name = Some((name.to_string(), line));
            }
            "sign" => {
                if rest.len() != 2 || !matches!(rest[1], "+" | "-") {
                    return Err(DiagramError::Syntax {
                        line,
                        col: 1,
                        code: "BAD_SIGN",
                        message: "sign takes a crossing id and + or -".into(),
                    });
                }
                signs.push((rest[0].to_string(), if rest[1] == "+" { 1 } else { -1 }, line));
            }
            other => {
                return Err(DiagramError::Syntax {
                    line,
                    col: 1,
                    code: "UNKNOWN_DIRECTIVE",
                    message: format!("unknown directive {other:?}"),
                });
            }
        }
    }

    for (name, sign, line) in signs {
        let Some(c) = crossings.iter_mut().find(|c| c.name == name) else {
            return Err(DiagramError::Syntax {
                line,
                col: 1,
                code: "UNKNOWN_CROSSING",
                message: format!("sign declared for unknown crossing {name}"),
            });
        };
        c.declared_sign = Some(sign);
    }
    let mark = match mark_name {
        None => None,
        Some((name, line)) => {
            Some(*arc_index.get(&name).ok_or_else(|| DiagramError::Syntax {
                line,
                col: 1,
                code: "UNKNOWN_ARC",
                message: format!("mark names unknown arc {name}"),
            })?)
        }
    };

    ProjectiveDiagram::from_parts(arc_names, crossings, boundary, free_unknots, mark)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const ESSENTIAL: &str = "boundary a:t a:h\n";

    /// Two essential circles crossing once; both components degenerate.
    pub(crate) const DEGENERATE: &str = "\
crossing x a1:h b2:t a2:t b1:h
boundary a1:t b2:h a2:h b1:t
";

    #[test]
    fn unknot_parses() {
        let d = parse_diagram("unknot 1\n").unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.free_unknots(), 1);
        assert!(d.is_local());
        assert_eq!(d.components().len(), 1);
        assert_eq!(d.writhe(), 0);
        assert!(d.validate().is_empty());
    }

    #[test]
    fn essential_circle_parses() {
        let d = parse_diagram(ESSENTIAL).unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.wall_passages(), 1);
        assert!(!d.is_local());
        let comps = d.components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].boundary_passages, 2);
    }

    #[test]
    fn degenerate_link_traces() {
        let d = parse_diagram(DEGENERATE).unwrap();
        assert!(d.validate().is_empty());
        let comps = d.components();
        assert_eq!(comps.len(), 2);
        for c in &comps {
            assert_eq!(c.mixed_crossings, 1);
            assert_eq!(c.boundary_passages, 2);
        }
        assert_eq!(d.degenerate_components().len(), 2);
        assert_eq!(d.writhe(), 1);
    }

    #[test]
    fn split_union_is_not_degenerate() {
        let d = parse_diagram("unknot 2\n").unwrap();
        assert_eq!(d.components().len(), 2);
        assert!(d.degenerate_components().is_empty());
    }

    #[test]
    fn serialization_round_trips() {
        for text in [
            "unknot 3\n",
            ESSENTIAL,
            DEGENERATE,
            "crossing x a1:h b2:t a2:t b1:h\nboundary a1:t b2:h a2:h b1:t\nmark a1\nsign x +\n",
        ] {
            let d = parse_diagram(text).unwrap();
            let s = d.serialize();
            let d2 = parse_diagram(&s).unwrap();
            assert_eq!(d, d2);
            assert_eq!(s, d2.serialize());
        }
    }

    #[test]
    fn two_heads_on_under_strand_is_reported() {
        // Slot 3 must be a tail.
        let text = "\
crossing x a1:h b2:t a2:h b1:h
boundary a1:t b1:t a2:t b2:h
";
        let err = parse_diagram(text).unwrap_err();
        let DiagramError::Invalid(violations) = err else {
            panic!("expected validation failure");
        };
        assert!(violations
            .iter()
            .any(|v| v.code == ViolationCode::OrientationViolation));
    }

    #[test]
    fn antipodal_continuity_is_reported() {
        let good = "boundary a:t b:t a:h b:h\n";
        let bad = "boundary a:t b:h b:t a:h\n";
        assert!(parse_diagram(good).is_ok());
        let err = parse_diagram(bad).unwrap_err();
        let DiagramError::Invalid(violations) = err else {
            panic!("expected validation failure");
        };
        assert!(violations
            .iter()
            .any(|v| v.code == ViolationCode::AntipodalViolation));
    }

    #[test]
    fn sign_mismatch_is_reported() {
        let text = "\
crossing x a1:h b2:t a2:t b1:h
boundary a1:t b2:h a2:h b1:t
sign x -
";
        let err = parse_diagram(text).unwrap_err();
        let DiagramError::Invalid(violations) = err else {
            panic!("expected validation failure");
        };
        assert!(violations
            .iter()
            .any(|v| v.code == ViolationCode::SignMismatch));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_diagram("crossing x a:h b:t\n").unwrap_err();
        match err {
            DiagramError::Syntax { line, code, .. } => {
                assert_eq!(line, 1);
                assert_eq!(code, "BAD_CROSSING");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn components_are_stable_under_relabelling() {
        let d = parse_diagram(DEGENERATE).unwrap();
        let renamed = DEGENERATE
            .replace("a1", "z9")
            .replace("a2", "z8")
            .replace("b1", "z1")
            .replace("b2", "z2");
        let d2 = parse_diagram(&renamed).unwrap();
        let shape = |d: &ProjectiveDiagram| {
            let mut v: Vec<(usize, usize, usize, usize)> = d
                .components()
                .iter()
                .map(|c| {
                    (
                        c.arcs.len(),
                        c.boundary_passages,
                        c.self_crossings,
                        c.mixed_crossings,
                    )
                })
                .collect();
            v.sort_unstable();
            v
        };
        assert_eq!(shape(&d), shape(&d2));
    }
}
