//! Boundary precision and recall, and the per-language benchmark built on it.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::models::{train, ModelError, ModelKind, ModelOptions};
use crate::segmentation::{extract, CorpusError, SegmentationHypothesis};
use crate::wordlist::{Level, Wordlist};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bpr {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub gold: usize,
    pub predicted: usize,
    pub correct: usize,
}

impl Bpr {
    /// Scores from pooled boundary counts. An empty prediction has precision
    /// 1 and an empty gold standard has recall 1.
    pub fn from_counts(gold: usize, predicted: usize, correct: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
        let precision = ratio(correct, predicted);
        let recall = ratio(correct, gold);
        Bpr {
            precision,
            recall,
            f1: f1(precision, recall),
            gold,
            predicted,
            correct,
        }
    }
}

pub fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("{gold} gold rows but {predicted} predicted rows")]
    RowMismatch { gold: usize, predicted: usize },
    #[error("row {row}: gold and predicted tokenizations differ")]
    TokenMismatch { row: usize },
    #[error("row {row}: boundary {position} outside 1..{len}")]
    OutOfRange {
        row: usize,
        position: usize,
        len: usize,
    },
}

fn check_range(row: usize, h: &SegmentationHypothesis) -> Result<(), EvalError> {
    match h.boundaries.iter().find(|&&p| p == 0 || p >= h.tokens.len()) {
        Some(&position) => Err(EvalError::OutOfRange {
            row,
            position,
            len: h.tokens.len(),
        }),
        None => Ok(()),
    }
}

/// Micro-averaged boundary precision/recall over aligned rows.
pub fn bpr(
    gold: &[SegmentationHypothesis],
    predicted: &[SegmentationHypothesis],
) -> Result<Bpr, EvalError> {
    if gold.len() != predicted.len() {
        return Err(EvalError::RowMismatch {
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    let (mut g, mut p, mut c) = (0, 0, 0);
    for (row, (gh, ph)) in gold.iter().zip(predicted).enumerate() {
        if gh.tokens != ph.tokens {
            return Err(EvalError::TokenMismatch { row });
        }
        check_range(row, gh)?;
        check_range(row, ph)?;
        g += gh.boundaries.len();
        p += ph.boundaries.len();
        c += gh.boundaries.intersection(&ph.boundaries).count();
    }
    Ok(Bpr::from_counts(g, p, c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Mean of per-language scores.
    #[default]
    Macro,
    /// Scores from boundary counts pooled over languages.
    Micro,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalCell {
    pub language: String,
    pub model: ModelKind,
    pub level: Level,
    #[serde(flatten)]
    pub score: Bpr,
    /// Vocabulary-size trajectory for subword models.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<usize>>,
    /// Whether a subword model ended with exactly the requested vocabulary
    /// size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reached_target: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub model: ModelKind,
    pub level: Level,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub languages: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub averaging: Averaging,
    pub cells: Vec<EvalCell>,
    pub aggregates: Vec<Aggregate>,
}

impl EvalReport {
    pub fn cell(&self, language: &str, model: ModelKind, level: Level) -> Option<&EvalCell> {
        self.cells
            .iter()
            .find(|c| c.language == language && c.model == model && c.level == level)
    }

    pub fn aggregate(&self, model: ModelKind, level: Level) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.model == model && a.level == level)
    }

    pub fn languages(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.cells.iter().map(|c| c.language.as_str()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("{language}: {source}")]
    Corpus {
        language: String,
        source: CorpusError,
    },
    #[error("{language}, {model}, {level}: {source}")]
    Model {
        language: String,
        model: ModelKind,
        level: Level,
        source: ModelError,
    },
    #[error("{language}, {model}, {level}: {source}")]
    Eval {
        language: String,
        model: ModelKind,
        level: Level,
        source: EvalError,
    },
}

fn run_cell(
    w: &Wordlist,
    language: &str,
    model: ModelKind,
    level: Level,
    options: &ModelOptions,
) -> Result<EvalCell, BenchmarkError> {
    let (corpus, gold) = extract(w, language, level).map_err(|source| BenchmarkError::Corpus {
        language: language.to_string(),
        source,
    })?;
    let target = if model.is_subword() {
        crate::models::resolve_target(w, language, level, options.target).map_err(|e| {
            BenchmarkError::Model {
                language: language.to_string(),
                model,
                level,
                source: e.into(),
            }
        })?
    } else {
        0
    };
    let trained =
        train(model, &corpus, options, target).map_err(|source| BenchmarkError::Model {
            language: language.to_string(),
            model,
            level,
            source,
        })?;
    let predicted: Vec<SegmentationHypothesis> = corpus
        .words
        .iter()
        .map(|word| trained.segmenter.segment(word))
        .collect();
    let score = bpr(&gold, &predicted).map_err(|source| BenchmarkError::Eval {
        language: language.to_string(),
        model,
        level,
        source,
    })?;
    Ok(EvalCell {
        language: language.to_string(),
        model,
        level,
        score,
        reached_target: trained.vocabulary.as_ref().map(|v| v.reached_target()),
        trajectory: trained.vocabulary.map(|v| v.trajectory),
    })
}

/// Per (model, level) averages over languages.
pub fn aggregate_cells(cells: &[EvalCell], averaging: Averaging) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(ModelKind, Level), Vec<&Bpr>> = BTreeMap::new();
    for c in cells {
        groups.entry((c.model, c.level)).or_default().push(&c.score);
    }
    groups
        .into_iter()
        .map(|((model, level), scores)| {
            let n = scores.len();
            let (precision, recall, f1) = match averaging {
                Averaging::Macro => {
                    let mean = |f: fn(&Bpr) -> f64| scores.iter().map(|s| f(s)).sum::<f64>() / n as f64;
                    (mean(|s| s.precision), mean(|s| s.recall), mean(|s| s.f1))
                }
                Averaging::Micro => {
                    let pooled = Bpr::from_counts(
                        scores.iter().map(|s| s.gold).sum(),
                        scores.iter().map(|s| s.predicted).sum(),
                        scores.iter().map(|s| s.correct).sum(),
                    );
                    (pooled.precision, pooled.recall, pooled.f1)
                }
            };
            Aggregate {
                model,
                level,
                precision,
                recall,
                f1,
                languages: n,
            }
        })
        .collect()
}

/// Trains and scores every (language, model, level) cell. Each language is
/// processed independently; cells run on scoped threads.
pub fn run_benchmark(
    w: &Wordlist,
    models: &[ModelKind],
    levels: &[Level],
    options: &ModelOptions,
    averaging: Averaging,
) -> Result<EvalReport, BenchmarkError> {
    let jobs: Vec<(String, ModelKind, Level)> = w
        .languages()
        .flat_map(|lang| {
            models.iter().flat_map(move |&m| {
                let lang = lang.to_string();
                levels.iter().map(move |&l| (lang.clone(), m, l))
            })
        })
        .collect();
    let results: Vec<Result<EvalCell, BenchmarkError>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(lang, m, l)| s.spawn(move || run_cell(w, lang, *m, *l, options)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("benchmark cell panicked"))
            .collect()
    });
    let cells = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(EvalReport {
        averaging,
        aggregates: aggregate_cells(&cells, averaging),
        cells,
    })
}
