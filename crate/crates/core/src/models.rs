//! Named model families and a single entry point to train any of them.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::metrics::{compute_stats, MetricsError};
use crate::morphoseg::{
    AffixModel, Direction, LsvConfig, LsvModel, MdlConfig, MdlModel, Segmenter, Statistic,
};
use crate::segmentation::TrainingCorpus;
use crate::subword::{
    bpe_train, unigram_train, wordpiece_train, SubwordError, SubwordVocabulary, UnigramConfig,
};
use crate::wordlist::{Level, Wordlist};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lsv,
    Lse,
    Lpe,
    Lspe,
    MaxDrop,
    Affix,
    Mdl,
    Bpe,
    WordPiece,
    Unigram,
}

impl ModelKind {
    pub const MORPHOSEG: [ModelKind; 7] = [
        ModelKind::Lsv,
        ModelKind::Lse,
        ModelKind::Lpe,
        ModelKind::Lspe,
        ModelKind::MaxDrop,
        ModelKind::Affix,
        ModelKind::Mdl,
    ];
    pub const SUBWORD: [ModelKind; 3] = [ModelKind::Bpe, ModelKind::WordPiece, ModelKind::Unigram];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lsv => "lsv",
            ModelKind::Lse => "lse",
            ModelKind::Lpe => "lpe",
            ModelKind::Lspe => "lspe",
            ModelKind::MaxDrop => "maxdrop",
            ModelKind::Affix => "affix",
            ModelKind::Mdl => "mdl",
            ModelKind::Bpe => "bpe",
            ModelKind::WordPiece => "wordpiece",
            ModelKind::Unigram => "unigram",
        }
    }

    pub fn is_subword(self) -> bool {
        Self::SUBWORD.contains(&self)
    }

    /// LSV-family configuration, if this is one of those models.
    pub fn lsv_config(self) -> Option<LsvConfig> {
        let (d, s) = match self {
            ModelKind::Lsv => (Direction::Successor, Statistic::Variety),
            ModelKind::Lse => (Direction::Successor, Statistic::Entropy),
            ModelKind::Lpe => (Direction::Predecessor, Statistic::Entropy),
            ModelKind::Lspe => (Direction::Both, Statistic::Entropy),
            ModelKind::MaxDrop => (Direction::Successor, Statistic::MaxDrop),
            _ => return None,
        };
        Some(LsvConfig::new(d, s))
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = Self::MORPHOSEG.iter().chain(&Self::SUBWORD);
        all.clone()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = all.map(|k| k.name()).collect();
                format!("unknown model {s:?} (expected one of {})", names.join(", "))
            })
    }
}

/// Vocabulary size for subword models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetSize {
    /// Morpheme inventory of the language at the training level: distinct
    /// surface morphs or distinct underlying morphemes.
    #[default]
    Gold,
    Fixed(usize),
}

impl FromStr for TargetSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "gold" {
            return Ok(TargetSize::Gold);
        }
        s.parse()
            .map(TargetSize::Fixed)
            .map_err(|_| format!("target size must be 'gold' or an integer, got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct ModelOptions {
    /// Overrides the LSV-family default threshold.
    pub threshold: Option<f64>,
    pub target: TargetSize,
    pub mdl: MdlConfig,
    pub unigram: UnigramConfig,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error(transparent)]
    Subword(#[from] SubwordError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("empty training corpus")]
    EmptyCorpus,
}

/// A trained model plus whatever training trace it produced.
pub struct Trained {
    pub kind: ModelKind,
    pub segmenter: Box<dyn Segmenter>,
    pub vocabulary: Option<SubwordVocabulary>,
}

impl fmt::Debug for Trained {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Trained")
            .field("kind", &self.kind)
            .field("vocabulary", &self.vocabulary)
            .finish_non_exhaustive()
    }
}

/// Resolves the subword target for the corpus' language and level.
pub fn resolve_target(
    w: &Wordlist,
    language: &str,
    level: Level,
    target: TargetSize,
) -> Result<usize, MetricsError> {
    Ok(match target {
        TargetSize::Fixed(n) => n,
        TargetSize::Gold => {
            let s = compute_stats(w, language)?;
            match level {
                Level::Surface => s.morphs_surface,
                Level::Underlying => s.morphemes_underlying,
            }
        }
    })
}

/// Trains `kind` on `corpus`. `gold_target` is only consulted by subword
/// models when `options.target` is `Gold`.
pub fn train(
    kind: ModelKind,
    corpus: &TrainingCorpus,
    options: &ModelOptions,
    gold_target: usize,
) -> Result<Trained, ModelError> {
    if corpus.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    let target = match options.target {
        TargetSize::Gold => gold_target,
        TargetSize::Fixed(n) => n,
    };
    let (segmenter, vocabulary): (Box<dyn Segmenter>, _) = match kind {
        ModelKind::Affix => (Box::new(AffixModel::train(corpus)), None),
        ModelKind::Mdl => (Box::new(MdlModel::train(corpus, options.mdl)), None),
        ModelKind::Bpe => {
            let m = bpe_train(corpus, target)?;
            let v = m.vocabulary.clone();
            (Box::new(m), Some(v))
        }
        ModelKind::WordPiece => {
            let m = wordpiece_train(corpus, target)?;
            let v = m.vocabulary.clone();
            (Box::new(m), Some(v))
        }
        ModelKind::Unigram => {
            let m = unigram_train(corpus, target, options.unigram)?;
            let v = m.vocabulary.clone();
            (Box::new(m), Some(v))
        }
        lsv => {
            let cfg = LsvConfig {
                threshold: options.threshold,
                ..lsv.lsv_config().expect("remaining kinds are LSV models")
            };
            (Box::new(LsvModel::train(corpus, cfg)), None)
        }
    };
    Ok(Trained {
        kind,
        segmenter,
        vocabulary,
    })
}

/// Trains on the language's corpus at `level`, resolving a gold target
/// from the wordlist.
pub fn train_for(
    w: &Wordlist,
    language: &str,
    level: Level,
    kind: ModelKind,
    options: &ModelOptions,
) -> Result<(TrainingCorpus, Trained), ModelError> {
    let corpus = crate::segmentation::extract_corpus(w, language, level)
        .map_err(|_| MetricsError::UnknownLanguage(language.to_string()))?;
    let target = if kind.is_subword() {
        resolve_target(w, language, level, options.target)?
    } else {
        0
    };
    let trained = train(kind, &corpus, options, target)?;
    Ok((corpus, trained))
}
