//! Unigram tokenizer.
//!
//! Seeds the vocabulary with every contiguous sub-sequence up to
//! `max_piece_len` plus all single segments, then alternates hard EM
//! (best-path segmentation, maximum-likelihood re-estimation) with pruning
//! of the multi-segment entries whose removal costs the least corpus
//! likelihood. Single segments are never pruned.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{weighted_types, Piece, SubwordError, SubwordVocabulary};
use crate::morphoseg::Segmenter;
use crate::segmentation::{SegmentationHypothesis, TrainingCorpus};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnigramConfig {
    pub max_piece_len: usize,
    pub prune_fraction: f64,
    pub em_iterations: usize,
}

impl Default for UnigramConfig {
    fn default() -> Self {
        UnigramConfig {
            max_piece_len: 6,
            prune_fraction: 0.2,
            em_iterations: 2,
        }
    }
}

/// Log-probabilities equal within this margin count as a tie.
const TIE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct UnigramModel {
    pub vocabulary: SubwordVocabulary,
    /// Whether the requested size was below the number of single segments.
    pub clamped: bool,
    log_probs: BTreeMap<Piece, f64>,
    floor: f64,
    longest: usize,
}

#[derive(Debug, Clone)]
struct Path {
    log_prob: f64,
    pieces: Vec<Piece>,
}

impl Path {
    /// Better = higher probability, then fewer pieces, then lexicographically
    /// smaller piece sequence.
    fn better_than(&self, other: &Path) -> bool {
        if self.log_prob > other.log_prob + TIE {
            return true;
        }
        if self.log_prob < other.log_prob - TIE {
            return false;
        }
        match self.pieces.len().cmp(&other.pieces.len()) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.pieces < other.pieces,
        }
    }
}

/// Max-probability segmentation. `log_prob` returns `None` for pieces that
/// may not be used.
fn best_path(
    word: &[String],
    longest: usize,
    log_prob: impl Fn(&[String]) -> Option<f64>,
) -> Option<Path> {
    let n = word.len();
    let mut best: Vec<Option<Path>> = vec![None; n + 1];
    best[0] = Some(Path {
        log_prob: 0.0,
        pieces: Vec::new(),
    });
    for end in 1..=n {
        for start in end.saturating_sub(longest)..end {
            let Some(prev) = &best[start] else { continue };
            let Some(lp) = log_prob(&word[start..end]) else { continue };
            let mut pieces = prev.pieces.clone();
            pieces.push(word[start..end].to_vec());
            let cand = Path {
                log_prob: prev.log_prob + lp,
                pieces,
            };
            if best[end].as_ref().is_none_or(|b| cand.better_than(b)) {
                best[end] = Some(cand);
            }
        }
    }
    best.pop().flatten()
}

struct Trainer<'a> {
    types: &'a [(Vec<String>, u64)],
    singles: BTreeSet<Piece>,
    log_probs: BTreeMap<Piece, f64>,
    floor: f64,
    longest: usize,
}

impl Trainer<'_> {
    fn lookup(&self, piece: &[String], excluded: Option<&Piece>) -> Option<f64> {
        if excluded.is_some_and(|e| e.as_slice() == piece) {
            return None;
        }
        match self.log_probs.get(piece) {
            Some(&lp) if lp.is_finite() => Some(lp),
            _ if piece.len() == 1 => Some(self.floor),
            _ => None,
        }
    }

    fn paths(&self, excluded: Option<&Piece>) -> Vec<Path> {
        self.types
            .iter()
            .map(|(w, _)| {
                best_path(w, self.longest, |p| self.lookup(p, excluded))
                    .expect("single segments keep every word segmentable")
            })
            .collect()
    }

    fn em_step(&mut self) {
        let paths = self.paths(None);
        let mut counts: BTreeMap<&Piece, u64> = BTreeMap::new();
        for (path, (_, weight)) in paths.iter().zip(self.types) {
            for p in &path.pieces {
                *counts.entry(p).or_insert(0) += weight;
            }
        }
        let total: u64 = counts.values().sum();
        let total = total as f64;
        for (piece, lp) in self.log_probs.iter_mut() {
            *lp = match counts.get(piece) {
                Some(&c) => (c as f64 / total).ln(),
                None => f64::NEG_INFINITY,
            };
        }
        // unused single segments stay usable, below any observed entry
        self.floor = (0.5 / total).ln();
    }

    /// Removes up to `limit` multi-segment entries, lowest likelihood loss
    /// first.
    fn prune(&mut self, limit: usize) {
        let paths = self.paths(None);
        let mut users: BTreeMap<&Piece, Vec<usize>> = BTreeMap::new();
        for (i, path) in paths.iter().enumerate() {
            for p in &path.pieces {
                if p.len() > 1 {
                    users.entry(p).or_default().push(i);
                }
            }
        }
        let mut losses: Vec<(f64, Piece)> = self
            .log_probs
            .keys()
            .filter(|p| p.len() > 1)
            .map(|p| {
                let loss = users.get(p).map_or(0.0, |rows| {
                    let mut rows = rows.clone();
                    rows.dedup();
                    rows.iter()
                        .map(|&i| {
                            let (w, weight) = &self.types[i];
                            let without = best_path(w, self.longest, |q| self.lookup(q, Some(p)))
                                .expect("single segments remain");
                            *weight as f64 * (paths[i].log_prob - without.log_prob)
                        })
                        .sum()
                });
                (loss, p.clone())
            })
            .collect();
        losses.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        for (_, p) in losses.into_iter().take(limit) {
            self.log_probs.remove(&p);
        }
    }
}

pub fn unigram_train(
    corpus: &TrainingCorpus,
    target_size: usize,
    config: UnigramConfig,
) -> Result<UnigramModel, SubwordError> {
    if target_size < 1 {
        return Err(SubwordError::TargetTooSmall);
    }
    if corpus.is_empty() {
        return Err(SubwordError::EmptyCorpus);
    }
    let types = weighted_types(&corpus.words);
    let longest = config.max_piece_len.max(1);

    let mut freq: BTreeMap<Piece, u64> = BTreeMap::new();
    for (w, weight) in &types {
        for start in 0..w.len() {
            for end in start + 1..=(start + longest).min(w.len()) {
                *freq.entry(w[start..end].to_vec()).or_insert(0) += weight;
            }
        }
    }
    let singles: BTreeSet<Piece> = freq.keys().filter(|p| p.len() == 1).cloned().collect();
    let clamped = target_size < singles.len();
    let target = if clamped {
        log::warn!(
            "unigram target {target_size} below {} single segments; clamping",
            singles.len()
        );
        singles.len()
    } else {
        target_size
    };
    let total: u64 = freq.values().sum();
    let log_probs: BTreeMap<Piece, f64> = freq
        .iter()
        .map(|(p, &c)| (p.clone(), (c as f64 / total as f64).ln()))
        .collect();
    let mut trainer = Trainer {
        types: &types,
        singles,
        log_probs,
        floor: (0.5 / total as f64).ln(),
        longest,
    };

    let mut trajectory = vec![trainer.log_probs.len()];
    while trainer.log_probs.len() > target {
        for _ in 0..config.em_iterations {
            trainer.em_step();
        }
        let multi = trainer.log_probs.len() - trainer.singles.len();
        let step = ((config.prune_fraction * multi as f64).ceil() as usize).max(1);
        trainer.prune(step.min(trainer.log_probs.len() - target));
        trajectory.push(trainer.log_probs.len());
    }
    for _ in 0..config.em_iterations.max(1) {
        trainer.em_step();
    }
    log::info!("unigram: vocabulary trajectory {trajectory:?}");

    let probabilities = trainer
        .log_probs
        .iter()
        .map(|(p, lp)| (p.clone(), lp.exp()))
        .collect();
    Ok(UnigramModel {
        vocabulary: SubwordVocabulary {
            entries: trainer.log_probs.keys().cloned().collect(),
            merges: Vec::new(),
            probabilities,
            target_size,
            trajectory,
        },
        clamped,
        log_probs: trainer.log_probs,
        floor: trainer.floor,
        longest,
    })
}

impl UnigramModel {
    pub fn pieces(&self, word: &[String]) -> Vec<Piece> {
        let lookup = |p: &[String]| match self.log_probs.get(p) {
            Some(&lp) if lp.is_finite() => Some(lp),
            _ if p.len() == 1 => Some(self.floor),
            _ => None,
        };
        best_path(word, self.longest, lookup)
            .map(|p| p.pieces)
            .unwrap_or_default()
    }
}

impl Segmenter for UnigramModel {
    fn segment(&self, word: &[String]) -> SegmentationHypothesis {
        if word.is_empty() {
            return SegmentationHypothesis::unsegmented(Vec::new());
        }
        SegmentationHypothesis::from_pieces(&self.pieces(word))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmentation::corpus_of;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn repeated_word_becomes_one_piece() {
        // seed frequencies over 10 x [a b]: a=10, b=10, ab=10 of 30 total.
        // whole: log(1/3); split: 2 log(1/3). The single piece wins.
        let p = 1.0f64 / 3.0;
        assert!(p.ln() > 2.0 * p.ln());
        let c = corpus_of(&["a b"; 10]);
        let m = unigram_train(&c, 3, UnigramConfig::default()).unwrap();
        assert!(m.segment(&toks("a b")).boundaries.is_empty());
    }

    #[test]
    fn singles_only_vocabulary_splits_fully() {
        let c = corpus_of(&["a b c", "a b", "b c"]);
        let m = unigram_train(&c, 3, UnigramConfig::default()).unwrap();
        assert_eq!(m.vocabulary.entries.len(), 3);
        assert!(m.vocabulary.entries.iter().all(|e| e.len() == 1));
        assert_eq!(m.segment(&toks("a b c")).boundaries, [1, 2].into());
    }

    #[test]
    fn target_below_singles_is_clamped() {
        let c = corpus_of(&["a b c", "a b"]);
        let m = unigram_train(&c, 1, UnigramConfig::default()).unwrap();
        assert!(m.clamped);
        assert_eq!(m.vocabulary.entries.len(), 3);
    }

    #[test]
    fn equal_probability_prefers_fewer_pieces_then_lexicographic() {
        // every piece has log-prob -1: [a b] beats [a][b]
        let lp = |_: &[String]| Some(-1.0);
        let path = best_path(&toks("a b"), 2, lp).unwrap();
        assert_eq!(path.pieces, [toks("a b")]);
        // [a b][c] vs [a][b c]: same probability and length; lexicographic
        let lp = |p: &[String]| (p.len() <= 2).then_some(-1.0);
        let path = best_path(&toks("a b c"), 2, lp).unwrap();
        assert_eq!(path.pieces, [toks("a"), toks("b c")]);
    }

    #[test]
    fn pruning_trajectory_decreases() {
        let c = corpus_of(&["a b c d", "a b", "c d", "b c", "d a b c"]);
        let m = unigram_train(&c, 6, UnigramConfig::default()).unwrap();
        assert!(m.vocabulary.entries.len() <= 6);
        assert!(m.vocabulary.trajectory.windows(2).all(|w| w[1] < w[0]));
        for w in &c.words {
            let h = m.segment(w);
            assert_eq!(&h.tokens, w);
        }
    }
}
