//! Flat token sequences with cut positions, and the training corpora they are
//! drawn from.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::wordlist::{Level, Morph, SoundToken, Wordlist};

/// A word as a flat token list plus cut positions. `p` in `boundaries`
/// means "cut before token `p`", so `1 <= p <= len - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SegmentationHypothesis {
    pub tokens: Vec<String>,
    pub boundaries: BTreeSet<usize>,
}

impl SegmentationHypothesis {
    pub fn new(tokens: Vec<String>, boundaries: impl IntoIterator<Item = usize>) -> Self {
        SegmentationHypothesis {
            tokens,
            boundaries: boundaries.into_iter().collect(),
        }
    }

    pub fn unsegmented(tokens: Vec<String>) -> Self {
        Self::new(tokens, [])
    }

    /// Cut positions from piece lengths.
    pub fn from_pieces<S: AsRef<str>>(pieces: &[Vec<S>]) -> Self {
        let mut tokens = Vec::new();
        let mut boundaries = BTreeSet::new();
        for piece in pieces {
            if !tokens.is_empty() && !piece.is_empty() {
                boundaries.insert(tokens.len());
            }
            tokens.extend(piece.iter().map(|s| s.as_ref().to_string()));
        }
        SegmentationHypothesis { tokens, boundaries }
    }

    pub fn is_well_formed(&self) -> bool {
        self.boundaries
            .iter()
            .all(|&p| p >= 1 && p < self.tokens.len())
    }

    pub fn pieces(&self) -> Vec<&[String]> {
        let mut out = Vec::new();
        let mut start = 0;
        for &p in &self.boundaries {
            out.push(&self.tokens[start..p]);
            start = p;
        }
        out.push(&self.tokens[start..]);
        out
    }
}

impl fmt::Display for SegmentationHypothesis {
    /// Tokens separated by spaces, cuts rendered as ` + `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self.pieces().iter().map(|p| p.join(" ")).collect();
        f.write_str(&rendered.join(" + "))
    }
}

/// Unsegmented words of one language at one representation level, one per
/// wordlist row, in row order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrainingCorpus {
    pub language: String,
    pub level: Level,
    pub row_ids: Vec<String>,
    pub words: Vec<Vec<String>>,
}

impl TrainingCorpus {
    pub fn from_words(words: Vec<Vec<String>>) -> Self {
        TrainingCorpus {
            language: String::new(),
            level: Level::Underlying,
            row_ids: (0..words.len()).map(|i| i.to_string()).collect(),
            words,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Distinct words, sorted.
    pub fn types(&self) -> BTreeSet<&[String]> {
        self.words.iter().map(Vec::as_slice).collect()
    }

    pub fn segment_types(&self) -> BTreeSet<&str> {
        self.words.iter().flatten().map(String::as_str).collect()
    }
}

/// Test helper: builds a corpus from space-separated strings.
pub fn corpus_of(words: &[&str]) -> TrainingCorpus {
    TrainingCorpus::from_words(
        words
            .iter()
            .map(|w| w.split_whitespace().map(str::to_string).collect())
            .collect(),
    )
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("unknown language {0:?}")]
    UnknownLanguage(String),
    #[error("row {row}: empty {level} projection")]
    EmptyProjection { row: String, level: Level },
}

pub fn extract_corpus(
    w: &Wordlist,
    language: &str,
    level: Level,
) -> Result<TrainingCorpus, CorpusError> {
    Ok(extract(w, language, level)?.0)
}

/// Gold segmentations: the corpus words with cuts at morph junctions.
pub fn gold_boundaries(
    w: &Wordlist,
    language: &str,
    level: Level,
) -> Result<Vec<SegmentationHypothesis>, CorpusError> {
    Ok(extract(w, language, level)?.1)
}

pub fn extract(
    w: &Wordlist,
    language: &str,
    level: Level,
) -> Result<(TrainingCorpus, Vec<SegmentationHypothesis>), CorpusError> {
    if !w.has_language(language) {
        return Err(CorpusError::UnknownLanguage(language.to_string()));
    }
    let mut corpus = TrainingCorpus {
        language: language.to_string(),
        level,
        row_ids: Vec::new(),
        words: Vec::new(),
    };
    let mut gold = Vec::new();
    for row in w.language_rows(language) {
        let (tokens, cuts) = row.projection(level);
        if tokens.is_empty() {
            return Err(CorpusError::EmptyProjection {
                row: row.id.clone(),
                level,
            });
        }
        corpus.row_ids.push(row.id.clone());
        corpus.words.push(tokens.clone());
        gold.push(SegmentationHypothesis::new(tokens, cuts));
    }
    Ok((corpus, gold))
}

/// Re-cuts a row's morphs at `cuts`, positions in its `level` projection.
/// Existing junctions are dropped. Tokens hidden at `level` stay with the
/// preceding token. `None` if a cut is out of range.
pub fn apply_cuts(morphs: &[Morph], level: Level, cuts: &BTreeSet<usize>) -> Option<Vec<Morph>> {
    let visible = |t: &SoundToken| match level {
        Level::Surface => t.surface().is_some(),
        Level::Underlying => t.underlying().is_some(),
    };
    let tokens: Vec<&SoundToken> = morphs.iter().flat_map(|m| m.tokens()).collect();
    let n = tokens.iter().filter(|t| visible(t)).count();
    if cuts.iter().any(|&c| c == 0 || c >= n) {
        return None;
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    let mut seen = 0;
    for t in tokens {
        if visible(t) {
            if cuts.contains(&seen) {
                out.push(Morph::new(std::mem::take(&mut current))?);
            }
            seen += 1;
        }
        current.push(t.clone());
    }
    out.push(Morph::new(current)?);
    Some(out)
}
