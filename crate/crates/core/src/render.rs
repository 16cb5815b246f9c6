//! Output formats: dot-grid text rendering of homology grids (one glyph
//! per generator, axes labelled by i and j, hollow glyph at bigrading
//! (0,0)), plus JSON and CSV forms of grids, filtered homology and
//! spectral sequences.

use std::fmt::Write as _;

use serde_json::json;

use crate::exactalg::{FilteredHomology, HomologySummary, SpectralSequence};

/// Text grid: columns are homological degrees, rows quantum degrees
/// (descending). Free rank renders as filled dots (a count when above
/// three), torsion as bracketed coefficients; one dot at (0, 0) is hollow.
pub fn grid_text(h: &HomologySummary) -> String {
    if h.cells.is_empty() {
        return "(empty homology)\n".into();
    }
    let i_min = h.cells.iter().map(|c| c.i).min().unwrap();
    let i_max = h.cells.iter().map(|c| c.i).max().unwrap();
    let j_min = h.cells.iter().map(|c| c.j).min().unwrap();
    let j_max = h.cells.iter().map(|c| c.j).max().unwrap();

    let cell_text = |i: i64, j: i64| -> String {
        let Some(cell) = h.cell(i, j) else {
            return String::new();
        };
        let mut s = String::new();
        let hollow = i == 0 && j == 0 && cell.free_rank > 0;
        match (cell.free_rank, hollow) {
            (0, _) => {}
            (r @ 1..=3, true) => {
                s.push('o');
                s.push_str(&"*".repeat(r - 1));
            }
            (r @ 1..=3, false) => s.push_str(&"*".repeat(r)),
            (r, true) => s.push_str(&format!("o,{}*", r - 1)),
            (r, false) => s.push_str(&format!("{r}*")),
        }
        for t in &cell.torsion {
            s.push_str(&format!("[{t}]"));
        }
        s
    };

    let mut width = 3usize;
    for i in i_min..=i_max {
        for j in j_min..=j_max {
            width = width.max(cell_text(i, j).len());
        }
        width = width.max(i.to_string().len());
    }
    let j_label_width = (j_min..=j_max)
        .map(|j| j.to_string().len())
        .max()
        .unwrap_or(1);

    let mut out = String::new();
    for j in (j_min..=j_max).rev() {
        write!(out, "{:>jw$} |", j, jw = j_label_width).unwrap();
        for i in i_min..=i_max {
            write!(out, " {:^width$}", cell_text(i, j)).unwrap();
        }
        out.push('\n');
    }
    write!(out, "{:>jw$} +", "", jw = j_label_width).unwrap();
    for _ in i_min..=i_max {
        write!(out, "-{:-^width$}", "").unwrap();
    }
    out.push('\n');
    write!(out, "{:>jw$}  ", "j/i", jw = j_label_width).unwrap();
    for i in i_min..=i_max {
        write!(out, " {:^width$}", i).unwrap();
    }
    out.push('\n');
    out
}

/// JSON grid per the documented schema: an array of cells
/// {"i", "j", "free_rank", "torsion"}.
pub fn grid_json(h: &HomologySummary) -> serde_json::Value {
    serde_json::to_value(&h.cells).unwrap()
}

/// CSV grid: i,j,free_rank,torsion (semicolon-joined).
pub fn grid_csv(h: &HomologySummary) -> String {
    let mut out = String::from("i,j,free_rank,torsion\n");
    for c in &h.cells {
        let torsion = c
            .torsion
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(";");
        writeln!(out, "{},{},{},{}", c.i, c.j, c.free_rank, torsion).unwrap();
    }
    out
}

pub fn filtered_text(h: &FilteredHomology) -> String {
    if h.degrees.is_empty() {
        return "(zero homology)\n".into();
    }
    let mut out = String::new();
    for d in &h.degrees {
        let levels: Vec<String> = d
            .s_levels
            .iter()
            .map(|(j, m)| {
                if *m == 1 {
                    format!("{j}")
                } else {
                    format!("{j} (x{m})")
                }
            })
            .collect();
        writeln!(
            out,
            "i = {:>3}: rank {}, s-levels {{{}}}",
            d.i,
            d.rank,
            levels.join(", ")
        )
        .unwrap();
    }
    out
}

pub fn filtered_json(h: &FilteredHomology) -> serde_json::Value {
    json!({
        "degrees": h.degrees.iter().map(|d| json!({
            "i": d.i,
            "rank": d.rank,
            "s_levels": d.s_levels.iter().map(|(j, m)| json!({"s": j, "rank": m})).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "total_rank": h.total_rank(),
        "s_support": h.s_support(),
    })
}

pub fn spectral_text(ss: &SpectralSequence) -> String {
    let mut out = String::new();
    for page in &ss.pages {
        writeln!(out, "E_{} (total rank {}):", page.r, page.total_rank()).unwrap();
        for ((i, j), r) in &page.ranks {
            let d = page
                .differential_ranks
                .get(&(*i, *j))
                .map(|dr| format!("  d_{} rank {}", page.r, dr))
                .unwrap_or_default();
            writeln!(out, "  ({i:>3},{j:>4}): {r}{d}").unwrap();
        }
    }
    writeln!(
        out,
        "stabilized at E_{}; nontrivial pages: {}",
        ss.stabilization_index, ss.nontrivial_page_count
    )
    .unwrap();
    out
}

pub fn spectral_json(ss: &SpectralSequence) -> serde_json::Value {
    json!({
        "pages": ss.pages.iter().map(|p| json!({
            "r": p.r,
            "ranks": p.ranks.iter().map(|((i, j), r)| json!({"i": i, "j": j, "rank": r})).collect::<Vec<_>>(),
            "differentials": p.differential_ranks.iter().map(|((i, j), r)| json!({"i": i, "j": j, "rank": r})).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "stabilization_index": ss.stabilization_index,
        "nontrivial_page_count": ss.nontrivial_page_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_diagram;
    use crate::exactalg::RingTag;
    use crate::theories::dkh_homology;

    #[test]
    fn unknot_grid_renders_with_hollow_origin() {
        let d = parse_diagram("unknot 1\n").unwrap();
        let h = dkh_homology(&d, RingTag::Rationals).unwrap();
        let text = grid_text(&h);
        assert!(text.contains('o'), "{text}");
        assert!(text.contains('*'));
        let json = grid_json(&h);
        assert_eq!(json.as_array().unwrap().len(), 4);
        assert_eq!(json[0]["free_rank"], 1);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let d = parse_diagram("unknot 1\n").unwrap();
        let h = dkh_homology(&d, RingTag::Integers).unwrap();
        let csv = grid_csv(&h);
        assert!(csv.starts_with("i,j,free_rank,torsion\n"));
        assert_eq!(csv.lines().count(), 5);
    }
}
