//! Subword tokenizers used as segmenters: BPE, WordPiece and Unigram.
//!
//! Training stops once the number of distinct entries *in use* in the
//! segmented training corpus reaches the requested size. That count can
//! fall as well as rise during merging, since a merge may consume the last
//! occurrences of its parts. The per-step counts are kept in
//! [`SubwordVocabulary::trajectory`].

mod merge;
mod unigram;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

pub use merge::{bpe_train, wordpiece_train, MergeModel, MergeRule};
pub use unigram::{unigram_train, UnigramConfig, UnigramModel};

pub type Piece = Vec<String>;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SubwordVocabulary {
    pub entries: BTreeSet<Piece>,
    /// Merge history in application order (BPE, WordPiece).
    pub merges: Vec<(Piece, Piece)>,
    /// Entry probabilities (Unigram).
    pub probabilities: BTreeMap<Piece, f64>,
    pub target_size: usize,
    /// Vocabulary size after each training step, starting with the initial
    /// state. For merge models this is the number of entry types in use; for
    /// Unigram the number of entries after each pruning round.
    pub trajectory: Vec<usize>,
}

impl SubwordVocabulary {
    pub fn reached_target(&self) -> bool {
        self.trajectory.last() == Some(&self.target_size)
    }

    /// True if the size ever moved against the model's usual direction:
    /// shrank during merging, or grew during pruning.
    pub fn has_decrease(&self) -> bool {
        self.trajectory.windows(2).any(|w| w[1] < w[0])
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubwordError {
    #[error("target vocabulary size must be at least 1")]
    TargetTooSmall,
    #[error("empty training corpus")]
    EmptyCorpus,
}

/// Distinct words with their multiplicities, in first-appearance order.
fn weighted_types(words: &[Vec<String>]) -> Vec<(Vec<String>, u64)> {
    let mut out: Vec<(Vec<String>, u64)> = Vec::new();
    let mut index: BTreeMap<&[String], usize> = BTreeMap::new();
    for w in words {
        match index.get(w.as_slice()) {
            Some(&i) => out[i].1 += 1,
            None => {
                index.insert(w, out.len());
                out.push((w.clone(), 1));
            }
        }
    }
    out
}

fn concat(a: &[String], b: &[String]) -> Piece {
    a.iter().chain(b).cloned().collect()
}
