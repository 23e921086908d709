//! Merge-based tokenizers. BPE merges the most frequent adjacent pair;
//! WordPiece the pair maximizing `count(ab) / (count(a) * count(b))`. Ties
//! go to the lexicographically smallest pair. Only pairs seen at least
//! twice are merged.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{concat, weighted_types, Piece, SubwordError, SubwordVocabulary};
use crate::morphoseg::Segmenter;
use crate::segmentation::{SegmentationHypothesis, TrainingCorpus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MergeRule {
    Bpe,
    WordPiece,
}

#[derive(Debug, Clone)]
pub struct MergeModel {
    pub rule: MergeRule,
    pub vocabulary: SubwordVocabulary,
    longest: usize,
}

/// Pair-selection score as an exact fraction `num / den`.
fn score(rule: MergeRule, pair: u64, left: u64, right: u64) -> (u64, u64) {
    match rule {
        MergeRule::Bpe => (pair, 1),
        MergeRule::WordPiece => (pair, left * right),
    }
}

fn apply_merge(word: &[Piece], a: &[String], b: &[String]) -> Vec<Piece> {
    let mut out = Vec::with_capacity(word.len());
    let mut i = 0;
    while i < word.len() {
        if i + 1 < word.len() && word[i] == a && word[i + 1] == b {
            out.push(concat(a, b));
            i += 2;
        } else {
            out.push(word[i].clone());
            i += 1;
        }
    }
    out
}

fn train(
    rule: MergeRule,
    corpus: &TrainingCorpus,
    target_size: usize,
) -> Result<MergeModel, SubwordError> {
    if target_size < 1 {
        return Err(SubwordError::TargetTooSmall);
    }
    if corpus.is_empty() {
        return Err(SubwordError::EmptyCorpus);
    }
    let types = weighted_types(&corpus.words);
    let mut seg: Vec<Vec<Piece>> = types
        .iter()
        .map(|(w, _)| w.iter().map(|s| vec![s.clone()]).collect())
        .collect();
    let mut vocab = SubwordVocabulary {
        entries: corpus.segment_types().into_iter().map(|s| vec![s.to_string()]).collect(),
        target_size,
        ..Default::default()
    };
    loop {
        let in_use: BTreeSet<&Piece> = seg.iter().flatten().collect();
        vocab.trajectory.push(in_use.len());
        if in_use.len() == target_size {
            break;
        }
        let mut pieces: HashMap<&Piece, u64> = HashMap::new();
        let mut pairs: HashMap<(&Piece, &Piece), u64> = HashMap::new();
        for (word, (_, weight)) in seg.iter().zip(&types) {
            for p in word {
                *pieces.entry(p).or_insert(0) += weight;
            }
            for w in word.windows(2) {
                *pairs.entry((&w[0], &w[1])).or_insert(0) += weight;
            }
        }
        let best = pairs
            .iter()
            .filter(|(_, &c)| c >= 2)
            .map(|(&(a, b), &c)| (score(rule, c, pieces[a], pieces[b]), a, b))
            .min_by(|(sx, ax, bx), (sy, ay, by)| {
                // larger score first: compare sy.0/sy.1 against sx.0/sx.1
                let lhs = u128::from(sy.0) * u128::from(sx.1);
                let rhs = u128::from(sx.0) * u128::from(sy.1);
                lhs.cmp(&rhs).then_with(|| (ax, bx).cmp(&(ay, by)))
            })
            .map(|(_, a, b)| (a.clone(), b.clone()));
        let Some((a, b)) = best else { break };
        log::debug!("{rule:?} merge {:?} + {:?} (in use {})", a, b, in_use.len());
        for word in seg.iter_mut() {
            *word = apply_merge(word, &a, &b);
        }
        vocab.entries.insert(concat(&a, &b));
        vocab.merges.push((a, b));
    }
    log::info!(
        "{rule:?}: {} merges, vocabulary trajectory {:?}",
        vocab.merges.len(),
        vocab.trajectory
    );
    let longest = vocab.entries.iter().map(Vec::len).max().unwrap_or(1);
    Ok(MergeModel {
        rule,
        vocabulary: vocab,
        longest,
    })
}

pub fn bpe_train(corpus: &TrainingCorpus, target_size: usize) -> Result<MergeModel, SubwordError> {
    train(MergeRule::Bpe, corpus, target_size)
}

pub fn wordpiece_train(
    corpus: &TrainingCorpus,
    target_size: usize,
) -> Result<MergeModel, SubwordError> {
    train(MergeRule::WordPiece, corpus, target_size)
}

impl MergeModel {
    /// Replays the merge history in order.
    pub fn replay(&self, word: &[String]) -> Vec<Piece> {
        let mut pieces: Vec<Piece> = word.iter().map(|s| vec![s.clone()]).collect();
        for (a, b) in &self.vocabulary.merges {
            pieces = apply_merge(&pieces, a, b);
        }
        pieces
    }

    /// Greedy longest match, left to right; unknown segments stand alone.
    pub fn longest_match(&self, word: &[String]) -> Vec<Piece> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < word.len() {
            let max = self.longest.min(word.len() - i);
            let len = (1..=max)
                .rev()
                .find(|&l| self.vocabulary.entries.contains(&word[i..i + l]))
                .unwrap_or(1);
            out.push(word[i..i + len].to_vec());
            i += len;
        }
        out
    }

    pub fn pieces(&self, word: &[String]) -> Vec<Piece> {
        match self.rule {
            MergeRule::Bpe => self.replay(word),
            MergeRule::WordPiece => self.longest_match(word),
        }
    }
}

impl Segmenter for MergeModel {
    fn segment(&self, word: &[String]) -> SegmentationHypothesis {
        SegmentationHypothesis::from_pieces(&self.pieces(word))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmentation::corpus_of;
    use std::collections::BTreeMap;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    /// Adjacent pair counts by direct enumeration over the raw words.
    fn oracle_pairs(words: &[&str]) -> BTreeMap<(String, String), u32> {
        let mut out = BTreeMap::new();
        for w in words {
            let t = toks(w);
            for p in t.windows(2) {
                *out.entry((p[0].clone(), p[1].clone())).or_insert(0) += 1;
            }
        }
        out
    }

    #[test]
    fn most_frequent_pair_merged_first() {
        let words = ["a b c", "a b d", "a b c"];
        let pairs = oracle_pairs(&words);
        assert_eq!(pairs[&("a".into(), "b".into())], 3);
        assert_eq!(pairs[&("b".into(), "c".into())], 2);
        let m = bpe_train(&corpus_of(&words), 1).unwrap();
        assert_eq!(m.vocabulary.merges[0], (toks("a"), toks("b")));
    }

    #[test]
    fn target_equal_to_segment_count_means_no_merges() {
        let c = corpus_of(&["a b c", "a b d", "a b c"]);
        let m = bpe_train(&c, 4).unwrap();
        assert!(m.vocabulary.merges.is_empty());
        assert_eq!(m.segment(&toks("a b c")).boundaries, [1, 2].into());
        let w = wordpiece_train(&c, 4).unwrap();
        assert!(w.vocabulary.merges.is_empty());
    }

    #[test]
    fn stops_when_no_pair_repeats() {
        let m = bpe_train(&corpus_of(&["a b", "c d"]), 1).unwrap();
        assert!(m.vocabulary.merges.is_empty());
        assert_eq!(m.vocabulary.trajectory, [4]);
        assert!(!m.vocabulary.reached_target());
    }

    #[test]
    fn zero_target_rejected() {
        assert_eq!(bpe_train(&corpus_of(&["a"]), 0).unwrap_err(), SubwordError::TargetTooSmall);
    }

    #[test]
    fn wordpiece_prefers_rare_parts() {
        // counts a=4, b=2, ab=2 -> 2/8; counts 4, 4, 3 -> 3/16
        assert_eq!(score(MergeRule::WordPiece, 2, 4, 2), (2, 8));
        assert_eq!(score(MergeRule::WordPiece, 3, 4, 4), (3, 16));
        // corpus: (x,y) three times with x=4,y=4; (a,b) twice with a=4,b=2
        let words = ["x y", "x y", "x y", "x a", "y a", "a b", "a b"];
        let c = corpus_of(&words);
        let wp = wordpiece_train(&c, 1).unwrap();
        assert_eq!(wp.vocabulary.merges[0], (toks("a"), toks("b")));
        let bpe = bpe_train(&c, 1).unwrap();
        assert_eq!(bpe.vocabulary.merges[0], (toks("x"), toks("y")));
    }

    #[test]
    fn single_word_identity_segmentation() {
        let c = corpus_of(&["a b c"]);
        let m = wordpiece_train(&c, 3).unwrap();
        assert_eq!(m.segment(&toks("a b c")).boundaries, [1, 2].into());
    }

    #[test]
    fn greedy_longest_match() {
        let m = MergeModel {
            rule: MergeRule::WordPiece,
            vocabulary: SubwordVocabulary {
                entries: [toks("a"), toks("b"), toks("a b c")].into(),
                ..Default::default()
            },
            longest: 3,
        };
        assert!(m.segment(&toks("a b c")).boundaries.is_empty());
        assert_eq!(m.segment(&toks("a b")).boundaries, [1].into());
    }

    #[test]
    fn boundaries_never_increase_over_merges() {
        let c = corpus_of(&["a b c d", "a b c", "b c d", "a b", "c d", "d a b"]);
        let m = bpe_train(&c, 1).unwrap();
        for w in &c.words {
            let mut pieces: Vec<Piece> = w.iter().map(|s| vec![s.clone()]).collect();
            let mut last = pieces.len();
            for (a, b) in &m.vocabulary.merges {
                pieces = apply_merge(&pieces, a, b);
                assert!(pieces.len() <= last);
                last = pieces.len();
            }
        }
    }
}
