//! Letter successor/predecessor variety and entropy segmenters.
//!
//! For each cut position `p` the forward score reads the distribution of
//! tokens following `word[..p]` across corpus word types (end of word
//! included), the backward score the distribution of tokens preceding
//! `word[p..]` (start of word included). A cut is predicted where the
//! combined score reaches the threshold and is a local maximum among its
//! neighbouring positions.

use serde::Serialize;

use super::trie::{PrefixStatistics, Statistic};
use super::Segmenter;
use crate::segmentation::{SegmentationHypothesis, TrainingCorpus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Successor,
    Predecessor,
    Both,
}

/// How forward and backward scores combine when `Direction::Both`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    #[default]
    Sum,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LsvConfig {
    pub direction: Direction,
    pub statistic: Statistic,
    pub combine: Combine,
    /// `None` selects the mean positive score over all corpus cut positions.
    pub threshold: Option<f64>,
}

impl LsvConfig {
    pub fn new(direction: Direction, statistic: Statistic) -> Self {
        LsvConfig {
            direction,
            statistic,
            combine: Combine::Sum,
            threshold: None,
        }
    }

    /// Successor and predecessor entropy, summed.
    pub fn lspe() -> Self {
        Self::new(Direction::Both, Statistic::Entropy)
    }
}

#[derive(Debug, Clone)]
pub struct LsvModel {
    config: LsvConfig,
    forward: PrefixStatistics,
    backward: PrefixStatistics,
    threshold: f64,
}

impl LsvModel {
    pub fn train(corpus: &TrainingCorpus, config: LsvConfig) -> Self {
        let types = corpus.types();
        let mut model = LsvModel {
            config,
            forward: PrefixStatistics::from_types(types.iter().copied()),
            backward: PrefixStatistics::from_reversed_types(types.iter().copied()),
            threshold: 0.0,
        };
        model.threshold = match config.threshold {
            Some(t) => t,
            None => {
                let positive: Vec<f64> = types
                    .iter()
                    .flat_map(|w| model.scores(w))
                    .filter(|&s| s > 0.0)
                    .collect();
                if positive.is_empty() {
                    f64::INFINITY
                } else {
                    positive.iter().sum::<f64>() / positive.len() as f64
                }
            }
        };
        model
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn forward_score(&self, word: &[String], p: usize) -> f64 {
        let counts = self.forward.continuations(word[..p].iter().map(String::as_str));
        self.config.statistic.score(&counts)
    }

    pub fn backward_score(&self, word: &[String], p: usize) -> f64 {
        let counts = self
            .backward
            .continuations(word[p..].iter().rev().map(String::as_str));
        self.config.statistic.score(&counts)
    }

    /// Combined scores for cut positions `1..len`; index `i` is position
    /// `i + 1`.
    pub fn scores(&self, word: &[String]) -> Vec<f64> {
        (1..word.len())
            .map(|p| match self.config.direction {
                Direction::Successor => self.forward_score(word, p),
                Direction::Predecessor => self.backward_score(word, p),
                Direction::Both => {
                    let (f, b) = (self.forward_score(word, p), self.backward_score(word, p));
                    match self.config.combine {
                        Combine::Sum => f + b,
                        Combine::Max => f.max(b),
                    }
                }
            })
            .collect()
    }
}

/// Positions whose score reaches `threshold` and is not smaller than either
/// existing neighbour.
pub fn peaks(scores: &[f64], threshold: f64) -> Vec<usize> {
    (0..scores.len())
        .filter(|&i| {
            let s = scores[i];
            s >= threshold
                && (i == 0 || s >= scores[i - 1])
                && (i + 1 == scores.len() || s >= scores[i + 1])
        })
        .map(|i| i + 1)
        .collect()
}

impl Segmenter for LsvModel {
    fn segment(&self, word: &[String]) -> SegmentationHypothesis {
        let cuts = peaks(&self.scores(word), self.threshold);
        SegmentationHypothesis::new(word.to_vec(), cuts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::segmentation::{corpus_of, extract_corpus};
    use crate::wordlist::Level;
    use std::collections::{BTreeMap, BTreeSet};

    /// Brute force: entropy of the successor distribution of `prefix` by
    /// scanning every word type.
    fn oracle_forward(types: &BTreeSet<Vec<String>>, prefix: &[String]) -> f64 {
        let mut counts: BTreeMap<Option<&String>, u32> = BTreeMap::new();
        for w in types {
            if w.len() >= prefix.len() && w[..prefix.len()] == *prefix {
                *counts.entry(w.get(prefix.len())).or_insert(0) += 1;
            }
        }
        entropy(counts.values())
    }

    fn oracle_backward(types: &BTreeSet<Vec<String>>, suffix: &[String]) -> f64 {
        let mut counts: BTreeMap<Option<&String>, u32> = BTreeMap::new();
        for w in types {
            if w.len() >= suffix.len() && w[w.len() - suffix.len()..] == *suffix {
                let before = (w.len() > suffix.len()).then(|| &w[w.len() - suffix.len() - 1]);
                *counts.entry(before).or_insert(0) += 1;
            }
        }
        entropy(counts.values())
    }

    fn entropy<'a>(counts: impl Iterator<Item = &'a u32> + Clone) -> f64 {
        let total: u32 = counts.clone().sum();
        counts
            .map(|&c| {
                let p = f64::from(c) / f64::from(total);
                -p * p.log2()
            })
            .sum()
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn equiprobable_continuations_give_one_bit() {
        let c = corpus_of(&["a b", "a c", "a b d e", "a b d f"]);
        let m = LsvModel::train(&c, LsvConfig::new(Direction::Successor, Statistic::Entropy));
        assert_eq!(m.forward_score(&toks("a b d e"), 3), 1.0);
        let types: BTreeSet<Vec<String>> = c.words.iter().cloned().collect();
        for w in &types {
            for p in 1..w.len() {
                assert!((m.forward_score(w, p) - oracle_forward(&types, &w[..p])).abs() < 1e-12);
                assert!((m.backward_score(w, p) - oracle_backward(&types, &w[p..])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_word_corpus_has_no_cuts() {
        let c = corpus_of(&["a b c d"]);
        for cfg in [LsvConfig::lspe(), LsvConfig::new(Direction::Successor, Statistic::Entropy)] {
            let m = LsvModel::train(&c, LsvConfig { threshold: Some(0.1), ..cfg });
            assert!(m.scores(&toks("a b c d")).iter().all(|&s| s == 0.0));
            assert!(m.segment(&toks("a b c d")).boundaries.is_empty());
        }
    }

    #[test]
    fn trie_scores_match_oracle_on_mandarin() {
        for w in [samples::mandarin(), samples::mandarin_syllabic()] {
            let c = extract_corpus(&w, samples::MANDARIN, Level::Surface).unwrap();
            let m = LsvModel::train(&c, LsvConfig::lspe());
            let types: BTreeSet<Vec<String>> = c.words.iter().cloned().collect();
            for word in &types {
                for (i, s) in m.scores(word).into_iter().enumerate() {
                    let p = i + 1;
                    let expect = oracle_forward(&types, &word[..p]) + oracle_backward(&types, &word[p..]);
                    assert!((s - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn lspe_on_syllabic_twenty_one() {
        // Frozen from the oracle above. Forward: after [er] 1 end vs 10 shi
        // words -> H(1/11, 10/11); after [er shi] 10 equiprobable -> log2 10.
        // Backward: before [shi yi] {start, er, san} -> log2 3; before [yi]
        // {start, shi x3} -> H(1/4, 3/4).
        let h = |ps: &[f64]| -> f64 { ps.iter().map(|p| -p * p.log2()).sum() };
        let s1 = h(&[1.0 / 11.0, 10.0 / 11.0]) + 3f64.log2();
        let s2 = 10f64.log2() + h(&[0.25, 0.75]);

        let w = samples::mandarin_syllabic();
        let c = extract_corpus(&w, samples::MANDARIN, Level::Surface).unwrap();
        let m = LsvModel::train(&c, LsvConfig::lspe());
        let scores = m.scores(&toks("er shi yi"));
        assert!((scores[0] - s1).abs() < 1e-12);
        assert!((scores[1] - s2).abs() < 1e-12);
        // s1 < s2, so position 1 is not a local maximum: only the cut
        // before "yi" survives the peak rule.
        assert_eq!(m.segment(&toks("er shi yi")).boundaries, BTreeSet::from([2]));
    }

    #[test]
    fn lspe_on_segmental_twenty_one() {
        let w = samples::mandarin();
        let c = extract_corpus(&w, samples::MANDARIN, Level::Surface).unwrap();
        let m = LsvModel::train(&c, LsvConfig::lspe());
        let word = toks("ɚ ⁵¹ ʂ ʅ ³⁵ j i ⁵⁵");
        assert_eq!(m.segment(&word).boundaries, BTreeSet::from([2, 5]));
    }

    #[test]
    fn peak_rule() {
        assert_eq!(peaks(&[1.0, 3.0, 2.0], 0.5), [2]);
        assert_eq!(peaks(&[2.0, 2.0], 0.5), [1, 2]);
        assert_eq!(peaks(&[3.0, 1.0, 3.0], 0.5), [1, 3]);
        assert_eq!(peaks(&[3.0, 1.0, 3.0], 5.0), Vec::<usize>::new());
        assert_eq!(peaks(&[], 0.0), Vec::<usize>::new());
    }

    #[test]
    fn unseen_tokens_score_zero() {
        let c = corpus_of(&["a b", "a c"]);
        let m = LsvModel::train(&c, LsvConfig::lspe());
        assert_eq!(m.scores(&toks("x y z")), [0.0, 0.0]);
    }
}
