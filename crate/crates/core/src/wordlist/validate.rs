//! Consistency checks over an annotated wordlist.
//!
//! Errors:
//! - every morph sharing a cognate ID within a language has the same
//!   underlying form;
//! - a cognate ID maps to exactly one gloss within a language;
//! - structural invariants (lengths, positive IDs, non-empty glosses and
//!   morphs, unique row IDs).
//!
//! Warnings:
//! - the numeral values of a language do not cover 1 to 40 contiguously.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::Wordlist;

/// Upper end of the numeral range expected in every language.
pub const COVERAGE_MAX: i64 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    InconsistentUnderlying,
    InconsistentGloss,
    Structure,
    DuplicateId,
    CoverageGap,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::InconsistentUnderlying => "inconsistent-underlying",
            ViolationKind::InconsistentGloss => "inconsistent-gloss",
            ViolationKind::Structure => "structure",
            ViolationKind::DuplicateId => "duplicate-id",
            ViolationKind::CoverageGap => "coverage-gap",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            ViolationKind::CoverageGap => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub language: String,
    pub rows: Vec<String>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_kind(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, v: Violation) {
        match v.kind.severity() {
            Severity::Error => self.violations.push(v),
            Severity::Warning => self.warnings.push(v),
        }
    }
}

pub fn validate(w: &Wordlist) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut ids = HashSet::new();
    for row in w.rows() {
        if !ids.insert(row.id.as_str()) {
            report.push(Violation {
                kind: ViolationKind::DuplicateId,
                language: row.language.clone(),
                rows: vec![row.id.clone()],
                message: format!("row ID {:?} occurs more than once", row.id),
            });
        }
        let mut problems = Vec::new();
        if row.morphs.is_empty() {
            problems.push("no morphs".to_string());
        }
        if row.morphs.len() != row.cognates.len() || row.morphs.len() != row.glosses.len() {
            problems.push(format!(
                "{} morphs, {} cognate IDs, {} glosses",
                row.morphs.len(),
                row.cognates.len(),
                row.glosses.len()
            ));
        }
        if row.cognates.contains(&0) {
            problems.push("cognate ID 0".to_string());
        }
        if row.glosses.iter().any(|g| g.is_empty() || g.contains(char::is_whitespace)) {
            problems.push("empty or blank gloss".to_string());
        }
        for (i, m) in row.morphs.iter().enumerate() {
            if m.tokens().is_empty() || (m.surface_form().is_empty() && m.underlying_form().is_empty())
            {
                problems.push(format!("morph {} is empty", i + 1));
            }
            if let Some(e) = m.tokens().iter().find_map(|t| t.check().err()) {
                problems.push(format!("morph {}: {e}", i + 1));
            }
        }
        for p in problems {
            report.push(Violation {
                kind: ViolationKind::Structure,
                language: row.language.clone(),
                rows: vec![row.id.clone()],
                message: p,
            });
        }
    }

    for language in w.languages() {
        // cognate id -> (underlying form -> rows), (gloss -> rows)
        let mut underlying: BTreeMap<u32, BTreeMap<Vec<&str>, Vec<&str>>> = BTreeMap::new();
        let mut glosses: BTreeMap<u32, BTreeMap<&str, Vec<&str>>> = BTreeMap::new();
        let mut values = BTreeSet::new();
        let order: HashMap<&str, usize> = w
            .language_rows(language)
            .enumerate()
            .map(|(i, r)| (r.id.as_str(), i))
            .collect();
        for row in w.language_rows(language) {
            values.insert(row.value);
            for ((m, &cog), gloss) in row.morphs.iter().zip(&row.cognates).zip(&row.glosses) {
                underlying
                    .entry(cog)
                    .or_default()
                    .entry(m.underlying_form())
                    .or_default()
                    .push(&row.id);
                glosses
                    .entry(cog)
                    .or_default()
                    .entry(gloss)
                    .or_default()
                    .push(&row.id);
            }
        }
        for (cog, forms) in &underlying {
            if forms.len() > 1 {
                let rendered: Vec<String> = forms.keys().map(|f| format!("[{}]", f.join(" "))).collect();
                report.push(Violation {
                    kind: ViolationKind::InconsistentUnderlying,
                    language: language.to_string(),
                    rows: dedup_rows(forms.values(), &order),
                    message: format!("cognate {cog} has underlying forms {}", rendered.join(", ")),
                });
            }
        }
        for (cog, gs) in &glosses {
            if gs.len() > 1 {
                let names: Vec<&str> = gs.keys().copied().collect();
                report.push(Violation {
                    kind: ViolationKind::InconsistentGloss,
                    language: language.to_string(),
                    rows: dedup_rows(gs.values(), &order),
                    message: format!("cognate {cog} is glossed {}", names.join(", ")),
                });
            }
        }
        let missing: Vec<String> = (1..=COVERAGE_MAX)
            .filter(|v| !values.contains(v))
            .map(|v| v.to_string())
            .collect();
        if !missing.is_empty() {
            report.push(Violation {
                kind: ViolationKind::CoverageGap,
                language: language.to_string(),
                rows: Vec::new(),
                message: format!(
                    "{} of the values 1-{COVERAGE_MAX} are missing",
                    missing.len()
                ),
            });
        }
    }
    report
}

/// Distinct row IDs in wordlist order.
fn dedup_rows<'a>(
    groups: impl Iterator<Item = &'a Vec<&'a str>>,
    order: &HashMap<&str, usize>,
) -> Vec<String> {
    let mut ids: Vec<&str> = groups.flatten().copied().collect();
    ids.sort_by_key(|id| order[id]);
    ids.dedup();
    ids.into_iter().map(str::to_string).collect()
}
