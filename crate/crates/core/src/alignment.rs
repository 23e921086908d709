//! Cognate classes and allomorph alignment matrices.
//!
//! Matrices are read off the inline annotations; nothing is inferred. Each
//! column is either an anchor for one underlying position or an insertion
//! slot for surface material that has no underlying counterpart. Insertions
//! attach before the next underlying position (or after the last one), and
//! several insertions in the same slot fill consecutive columns, shared
//! greedily across occurrences.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::wordlist::{validate, Morph, ViolationKind, Wordlist};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Occurrence {
    pub row: String,
    pub morph_index: usize,
    pub morph: Morph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CognateClass {
    pub language: String,
    pub cognate_id: u32,
    pub gloss: String,
    pub underlying: Vec<String>,
    pub occurrences: Vec<Occurrence>,
    pub allomorphs: BTreeSet<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "position", rename_all = "lowercase")]
pub enum Column {
    /// 0-based underlying position.
    Anchor(usize),
    /// Insertion slot before underlying position `n` (`n == len` means after
    /// the last one).
    Insertion(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlignmentMatrix {
    pub columns: Vec<Column>,
    /// One row per occurrence; `None` is a gap.
    pub rows: Vec<Vec<Option<String>>>,
}

#[derive(Debug, Error)]
pub enum AlignmentError {
    #[error("cannot build cognate classes: {0} inconsistent-underlying violation(s)")]
    InconsistentUnderlying(usize),
}

/// Groups every morph into its (language, cognate ID) class.
pub fn build_cognate_classes(w: &Wordlist) -> Result<Vec<CognateClass>, AlignmentError> {
    let report = validate(w);
    let bad = report
        .violations
        .iter()
        .filter(|v| v.kind == ViolationKind::InconsistentUnderlying)
        .count();
    if bad > 0 {
        return Err(AlignmentError::InconsistentUnderlying(bad));
    }
    let mut classes = Vec::new();
    for language in w.languages() {
        let mut by_id: BTreeMap<u32, CognateClass> = BTreeMap::new();
        for row in w.language_rows(language) {
            for (i, ((m, &cog), gloss)) in row
                .morphs
                .iter()
                .zip(&row.cognates)
                .zip(&row.glosses)
                .enumerate()
            {
                let class = by_id.entry(cog).or_insert_with(|| CognateClass {
                    language: language.to_string(),
                    cognate_id: cog,
                    gloss: gloss.clone(),
                    underlying: to_owned(m.underlying_form()),
                    occurrences: Vec::new(),
                    allomorphs: BTreeSet::new(),
                });
                class.allomorphs.insert(to_owned(m.surface_form()));
                class.occurrences.push(Occurrence {
                    row: row.id.clone(),
                    morph_index: i,
                    morph: m.clone(),
                });
            }
        }
        classes.extend(by_id.into_values());
    }
    Ok(classes)
}

fn to_owned(v: Vec<&str>) -> Vec<String> {
    v.into_iter().map(str::to_string).collect()
}

/// One occurrence split into anchor cells and per-slot insertions.
struct Layout {
    anchors: Vec<Option<String>>,
    insertions: Vec<Vec<String>>,
}

fn layout(m: &Morph, underlying_len: usize) -> Layout {
    let mut anchors = Vec::with_capacity(underlying_len);
    let mut insertions = vec![Vec::new(); underlying_len + 1];
    for t in m.tokens() {
        match t.underlying() {
            Some(_) => anchors.push(t.surface().map(str::to_string)),
            None => {
                let slot = anchors.len();
                if let Some(s) = t.surface() {
                    insertions[slot].push(s.to_string());
                }
            }
        }
    }
    Layout {
        anchors,
        insertions,
    }
}

pub fn align_class(c: &CognateClass) -> AlignmentMatrix {
    let n = c.underlying.len();
    let layouts: Vec<Layout> = c.occurrences.iter().map(|o| layout(&o.morph, n)).collect();
    let widths: Vec<usize> = (0..=n)
        .map(|slot| layouts.iter().map(|l| l.insertions[slot].len()).max().unwrap_or(0))
        .collect();
    let mut columns = Vec::new();
    for (slot, &width) in widths.iter().enumerate() {
        columns.extend(std::iter::repeat_n(Column::Insertion(slot), width));
        if slot < n {
            columns.push(Column::Anchor(slot));
        }
    }
    let rows = layouts
        .iter()
        .map(|l| {
            let mut row = Vec::with_capacity(columns.len());
            for (slot, &width) in widths.iter().enumerate() {
                let ins = &l.insertions[slot];
                row.extend(ins.iter().cloned().map(Some));
                row.extend(std::iter::repeat_n(None, width - ins.len()));
                if slot < n {
                    row.push(l.anchors.get(slot).cloned().flatten());
                }
            }
            row
        })
        .collect();
    AlignmentMatrix { columns, rows }
}

/// Plain-text block: class header, column header, one aligned row per
/// occurrence with gaps as `-`.
pub fn render_class(c: &CognateClass, m: &AlignmentMatrix) -> String {
    let header: Vec<String> = m
        .columns
        .iter()
        .map(|col| match col {
            Column::Anchor(i) => c.underlying[*i].clone(),
            Column::Insertion(_) => "+".to_string(),
        })
        .collect();
    let cell = |s: &Option<String>| s.clone().unwrap_or_else(|| "-".to_string());
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &m.rows {
        for (w, s) in width.iter_mut().zip(row) {
            *w = (*w).max(cell(s).chars().count());
        }
    }
    let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w - s.chars().count()));
    let line = |cells: Vec<String>| {
        cells
            .iter()
            .zip(&width)
            .map(|(s, &w)| pad(s, w))
            .collect::<Vec<_>>()
            .join(" ")
            .trim_end()
            .to_string()
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} cognate {} {} [{}]",
        c.language,
        c.cognate_id,
        c.gloss,
        c.underlying.join(" ")
    );
    let _ = writeln!(out, "{:<12} {}", "UNDERLYING", line(header.clone()));
    for (occ, row) in c.occurrences.iter().zip(&m.rows) {
        let _ = writeln!(out, "{:<12} {}", occ.row, line(row.iter().map(cell).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::wordlist::parse_segments;

    fn class_of(segments: &[&str]) -> CognateClass {
        let occurrences: Vec<Occurrence> = segments
            .iter()
            .enumerate()
            .map(|(i, s)| Occurrence {
                row: format!("r{i}"),
                morph_index: 0,
                morph: parse_segments(s).unwrap().remove(0),
            })
            .collect();
        CognateClass {
            language: "x".into(),
            cognate_id: 1,
            gloss: "X".into(),
            underlying: to_owned(occurrences[0].morph.underlying_form()),
            allomorphs: occurrences.iter().map(|o| to_owned(o.morph.surface_form())).collect(),
            occurrences,
        }
    }

    fn strip(row: &[Option<String>]) -> Vec<String> {
        row.iter().flatten().cloned().collect()
    }

    /// Checks every matrix invariant by enumeration.
    fn assert_invariants(c: &CognateClass, m: &AlignmentMatrix) {
        let anchors: Vec<usize> = m
            .columns
            .iter()
            .filter_map(|col| match col {
                Column::Anchor(i) => Some(*i),
                _ => None,
            })
            .collect();
        assert_eq!(anchors, (0..c.underlying.len()).collect::<Vec<_>>());
        for (occ, row) in c.occurrences.iter().zip(&m.rows) {
            assert_eq!(row.len(), m.columns.len());
            assert_eq!(strip(row), to_owned(occ.morph.surface_form()));
        }
    }

    #[test]
    fn german_suffix_class() {
        let w = samples::table2();
        let classes = build_cognate_classes(&w).unwrap();
        let ty = classes
            .iter()
            .find(|c| c.language == "stan1295" && c.cognate_id == 6)
            .unwrap();
        let m = align_class(ty);
        assert_eq!(m.columns.len(), 3);
        assert!(m.columns.iter().all(|c| matches!(c, Column::Anchor(_))));
        assert_eq!(strip(&m.rows[0]), ["ts", "I", "ç"]);
        assert_eq!(strip(&m.rows[1]), ["s", "I", "ç"]);
        assert_invariants(ty, &m);
    }

    #[test]
    fn german_classes_and_glosses() {
        let classes = build_cognate_classes(&samples::table2()).unwrap();
        let german: Vec<(u32, &str)> = classes
            .iter()
            .filter(|c| c.language == "stan1295")
            .map(|c| (c.cognate_id, c.gloss.as_str()))
            .collect();
        assert_eq!(
            german,
            [(1, "ONE"), (2, "TWO"), (3, "THREE"), (4, "and"), (5, "TWEN"), (6, "TY")]
        );
    }

    #[test]
    fn french_three_allomorphs() {
        let classes = build_cognate_classes(&samples::table2()).unwrap();
        let three = classes
            .iter()
            .find(|c| c.language == "stan1290" && c.cognate_id == 3)
            .unwrap();
        let expected: BTreeSet<Vec<String>> = [vec!["t", "ʁ", "w", "a"], vec!["t", "ʁ"]]
            .into_iter()
            .map(|v| v.into_iter().map(str::to_string).collect())
            .collect();
        assert_eq!(three.allomorphs, expected);
        let m = align_class(three);
        assert_eq!(m.rows[1], [Some("t".into()), Some("ʁ".into()), None, None]);
        assert_invariants(three, &m);
    }

    #[test]
    fn every_morph_in_exactly_one_class() {
        let w = samples::table2();
        let classes = build_cognate_classes(&w).unwrap();
        let total: usize = classes.iter().map(|c| c.occurrences.len()).sum();
        assert_eq!(total, w.rows().iter().map(|r| r.morphs.len()).sum::<usize>());
    }

    #[test]
    fn monomorphemic_language_has_one_class_per_word() {
        let w = samples::concatenative_system("x", &[vec!["a"], vec!["b"]], &["c"], 3);
        let classes = build_cognate_classes(&w).unwrap();
        assert_eq!(classes.len(), w.len());
    }

    #[test]
    fn single_occurrence_is_its_surface() {
        let c = class_of(&["a b/- c"]);
        let m = align_class(&c);
        assert_eq!(m.rows.len(), 1);
        assert_eq!(m.rows[0], [Some("a".into()), Some("b".into()), Some("c".into())]);
        assert_invariants(&c, &m);
    }

    #[test]
    fn surface_insertion_gets_its_own_column() {
        let c = class_of(&["a b", "a -/b c/-"]);
        let m = align_class(&c);
        assert_eq!(
            m.columns,
            [Column::Anchor(0), Column::Anchor(1), Column::Insertion(2)]
        );
        assert_eq!(m.rows[0], [Some("a".into()), Some("b".into()), None]);
        assert_eq!(m.rows[1], [Some("a".into()), None, Some("c".into())]);
        assert_invariants(&c, &m);
    }

    #[test]
    fn insertions_merge_greedily_across_occurrences() {
        let c = class_of(&["x/- a b", "y/- z/- a b", "a q/- b"]);
        let m = align_class(&c);
        assert_eq!(
            m.columns,
            [
                Column::Insertion(0),
                Column::Insertion(0),
                Column::Anchor(0),
                Column::Insertion(1),
                Column::Anchor(1)
            ]
        );
        assert_eq!(m.rows[0][..2], [Some("x".into()), None]);
        assert_eq!(m.rows[1][..2], [Some("y".into()), Some("z".into())]);
        assert_invariants(&c, &m);
    }

    #[test]
    fn aligning_twice_is_identical() {
        let c = class_of(&["x/- a b", "a -/b c/-", "a b"]);
        assert_eq!(align_class(&c), align_class(&c));
    }

    #[test]
    fn refuses_inconsistent_classes() {
        let mut w = samples::table2();
        let mut row = w.get("german-32").unwrap().clone();
        row.morphs[3] = parse_segments("s I ç").unwrap().remove(0);
        w.replace(row);
        assert!(matches!(
            build_cognate_classes(&w),
            Err(AlignmentError::InconsistentUnderlying(1))
        ));
    }

    #[test]
    fn rendering_shows_gaps() {
        let c = class_of(&["a b", "a -/b c/-"]);
        let text = render_class(&c, &align_class(&c));
        assert!(text.contains("r1           a - c"), "{text}");
    }
}
