//! Tabular renderings of statistics and benchmark results.
//!
//! Paired cells are written "S / U": surface value on the left, underlying
//! value on the right.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::evaluation::EvalReport;
use crate::metrics::{CorrelationRow, LanguageStats, ALPHA};
use crate::models::ModelKind;
use crate::wordlist::Level;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Tsv,
    #[default]
    Table,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(Format::Tsv),
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (expected tsv, table or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.headers).chain(&self.rows) {
            out.push_str(&line.join("\t"));
            out.push('\n');
        }
        out
    }

    /// Aligned columns with a rule under the header. Columns whose cells
    /// all start with a digit or "-" are right-aligned.
    pub fn to_text(&self) -> String {
        let width = |i: usize| {
            std::iter::once(&self.headers)
                .chain(&self.rows)
                .map(|r| r[i].chars().count())
                .max()
                .unwrap_or(0)
        };
        let numeric = |i: usize| {
            !self.rows.is_empty()
                && self.rows.iter().all(|r| {
                    r[i].starts_with(|c: char| c.is_ascii_digit() || c == '-')
                })
        };
        let widths: Vec<usize> = (0..self.headers.len()).map(width).collect();
        let right: Vec<bool> = (0..self.headers.len()).map(numeric).collect();
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate() {
                let pad = " ".repeat(widths[i] - c.chars().count());
                if i > 0 {
                    s.push_str("  ");
                }
                if right[i] {
                    s.push_str(&pad);
                    s.push_str(c);
                } else {
                    s.push_str(c);
                    s.push_str(&pad);
                }
            }
            s.trim_end().to_string()
        };
        let mut out = line(&self.headers);
        out.push('\n');
        let total = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }

    /// TSV or aligned text. JSON is left to the caller, which usually has a
    /// richer value to serialize than the table.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Tsv => self.to_tsv(),
            Format::Table | Format::Json => self.to_text(),
        }
    }
}

fn f2(x: f64) -> String {
    format!("{x:.2}")
}

fn pair(s: String, u: String) -> String {
    format!("{s} / {u}")
}

/// One row per language with every statistic.
pub fn stats_table(stats: &[(String, LanguageStats)]) -> Table {
    let mut t = Table::new([
        "Language",
        "Morph.",
        "Expressivity",
        "Opacity",
        "Length",
        "TTR",
        "Entropy",
        "Tokens",
        "Values",
    ]);
    for (lang, s) in stats {
        t.push(vec![
            lang.clone(),
            pair(s.morphs_surface.to_string(), s.morphemes_underlying.to_string()),
            pair(f2(s.expressivity_surface), f2(s.expressivity_underlying)),
            f2(s.opacity),
            f2(s.avg_code_length),
            format!("{:.3}", s.ttr),
            format!("{:.3}", s.entropy),
            format!("{:.2}", s.weighted_tokens),
            s.distinct_values.to_string(),
        ]);
    }
    t
}

fn f1_pair(report: &EvalReport, language: &str, model: ModelKind) -> String {
    let get = |level| {
        report
            .cell(language, model, level)
            .map_or("-".to_string(), |c| f2(c.score.f1))
    };
    pair(get(Level::Surface), get(Level::Underlying))
}

/// Per-language statistics next to the F1 of selected models.
pub fn overview_table(
    stats: &[(String, LanguageStats)],
    report: &EvalReport,
    models: &[ModelKind],
) -> Table {
    let mut headers: Vec<String> = ["Language", "Morph.", "Expressivity", "Opacity", "Length"]
        .map(String::from)
        .into();
    headers.extend(models.iter().map(|m| display_name(*m).to_string()));
    let mut t = Table::new(headers);
    for (lang, s) in stats {
        let mut row = vec![
            lang.clone(),
            pair(s.morphs_surface.to_string(), s.morphemes_underlying.to_string()),
            pair(f2(s.expressivity_surface), f2(s.expressivity_underlying)),
            f2(s.opacity),
            f2(s.avg_code_length),
        ];
        row.extend(models.iter().map(|&m| f1_pair(report, lang, m)));
        t.push(row);
    }
    t
}

pub fn display_name(m: ModelKind) -> &'static str {
    match m {
        ModelKind::Lsv => "LSV",
        ModelKind::Lse => "LSE",
        ModelKind::Lpe => "LPE",
        ModelKind::Lspe => "LSPE",
        ModelKind::MaxDrop => "MaxDrop",
        ModelKind::Affix => "Affix",
        ModelKind::Mdl => "Morfessor",
        ModelKind::Bpe => "BPE",
        ModelKind::WordPiece => "WordPiece",
        ModelKind::Unigram => "Unigram",
    }
}

/// Aggregated P/R/F1 per model, one row per model, "S / U" cells.
pub fn model_table(report: &EvalReport, models: &[ModelKind]) -> Table {
    let mut t = Table::new(["Model", "Precision", "Recall", "F1"]);
    for &m in models {
        let get = |level, f: fn(&crate::evaluation::Aggregate) -> f64| {
            report.aggregate(m, level).map_or("-".to_string(), |a| f2(f(a)))
        };
        if report.aggregate(m, Level::Surface).is_none()
            && report.aggregate(m, Level::Underlying).is_none()
        {
            continue;
        }
        t.push(vec![
            display_name(m).to_string(),
            pair(get(Level::Surface, |a| a.precision), get(Level::Underlying, |a| a.precision)),
            pair(get(Level::Surface, |a| a.recall), get(Level::Underlying, |a| a.recall)),
            pair(get(Level::Surface, |a| a.f1), get(Level::Underlying, |a| a.f1)),
        ]);
    }
    t
}

/// Morpheme segmentation summary.
pub fn morphoseg_table(report: &EvalReport) -> Table {
    model_table(report, &ModelKind::MORPHOSEG)
}

/// Subword summary, with how many training runs hit the target size and how
/// many had a non-monotonic vocabulary trajectory.
pub fn subword_table(report: &EvalReport) -> Table {
    let mut t = model_table(report, &ModelKind::SUBWORD);
    t.headers.push("Target hit".into());
    t.headers.push("Non-monotonic".into());
    let mut kept = ModelKind::SUBWORD
        .iter()
        .filter(|&&m| report.cells.iter().any(|c| c.model == m));
    for row in &mut t.rows {
        let m = *kept.next().expect("one row per evaluated model");
        let runs: Vec<&Vec<usize>> = report
            .cells
            .iter()
            .filter(|c| c.model == m)
            .filter_map(|c| c.trajectory.as_ref())
            .collect();
        row.push(format!("{}/{}", target_hits(report, m), runs.len()));
        row.push(format!(
            "{}/{}",
            runs.iter().filter(|t| non_monotonic(t)).count(),
            runs.len()
        ));
    }
    t
}

fn target_hits(report: &EvalReport, m: ModelKind) -> usize {
    report
        .cells
        .iter()
        .filter(|c| c.model == m)
        .filter(|c| c.reached_target == Some(true))
        .count()
}

/// True if the sequence changes direction at least once.
pub fn non_monotonic(t: &[usize]) -> bool {
    let up = t.windows(2).any(|w| w[1] > w[0]);
    let down = t.windows(2).any(|w| w[1] < w[0]);
    up && down
}

/// Every benchmark cell.
pub fn cells_table(report: &EvalReport) -> Table {
    let mut t = Table::new([
        "Language", "Model", "Level", "Precision", "Recall", "F1", "Gold", "Predicted", "Correct",
    ]);
    for c in &report.cells {
        t.push(vec![
            c.language.clone(),
            c.model.to_string(),
            c.level.to_string(),
            format!("{:.3}", c.score.precision),
            format!("{:.3}", c.score.recall),
            format!("{:.3}", c.score.f1),
            c.score.gold.to_string(),
            c.score.predicted.to_string(),
            c.score.correct.to_string(),
        ]);
    }
    t
}

pub fn correlation_table(rows: &[CorrelationRow]) -> Table {
    let mut t = Table::new(["X", "Y", "rho", "p", "n", "Significant"]);
    for r in rows {
        let (rho, p, n, sig) = match &r.result {
            Ok(c) => (
                format!("{:.3}", c.rho),
                format!("{:.4}", c.p),
                c.n.to_string(),
                if c.significant() { "yes" } else { "no" }.to_string(),
            ),
            Err(e) => (format!("undefined ({e})"), "-".into(), "-".into(), "-".into()),
        };
        t.push(vec![r.x.name().into(), r.y.name().into(), rho, p, n, sig]);
    }
    t
}

/// Footer line stating the significance level.
pub fn alpha_note() -> String {
    let mut s = String::new();
    let _ = write!(s, "significance level alpha = {ALPHA}");
    s
}
