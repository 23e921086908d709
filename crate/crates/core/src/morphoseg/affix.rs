//! Cuts wherever the prefix or the suffix on either side is itself a
//! complete corpus word.

use std::collections::HashSet;

use super::Segmenter;
use crate::segmentation::{SegmentationHypothesis, TrainingCorpus};

#[derive(Debug, Clone, Default)]
pub struct AffixModel {
    words: HashSet<Vec<String>>,
}

impl AffixModel {
    pub fn train(corpus: &TrainingCorpus) -> Self {
        AffixModel {
            words: corpus.words.iter().cloned().collect(),
        }
    }

    pub fn is_word(&self, tokens: &[String]) -> bool {
        self.words.contains(tokens)
    }
}

impl Segmenter for AffixModel {
    fn segment(&self, word: &[String]) -> SegmentationHypothesis {
        let cuts = (1..word.len()).filter(|&p| self.is_word(&word[..p]) || self.is_word(&word[p..]));
        SegmentationHypothesis::new(word.to_vec(), cuts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::segmentation::{corpus_of, extract};
    use crate::wordlist::Level;
    use std::collections::BTreeSet;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    /// Enumerates both membership conditions by scanning the word list.
    fn oracle(words: &[Vec<String>], w: &[String]) -> BTreeSet<usize> {
        (1..w.len())
            .filter(|&p| words.iter().any(|c| c[..] == w[..p] || c[..] == w[p..]))
            .collect()
    }

    #[test]
    fn compound_of_two_words() {
        let c = corpus_of(&["a b", "c d", "a b c d"]);
        let m = AffixModel::train(&c);
        assert_eq!(m.segment(&toks("a b c d")).boundaries, BTreeSet::from([2]));
        assert_eq!(oracle(&c.words, &toks("a b c d")), BTreeSet::from([2]));
    }

    #[test]
    fn unrelated_word_stays_whole() {
        let c = corpus_of(&["a b", "c d"]);
        let m = AffixModel::train(&c);
        assert!(m.segment(&toks("x y z")).boundaries.is_empty());
    }

    #[test]
    fn syllabic_eleven() {
        let w = samples::mandarin_syllabic();
        let (c, _) = extract(&w, samples::MANDARIN, Level::Surface).unwrap();
        let m = AffixModel::train(&c);
        assert_eq!(m.segment(&toks("shi yi")).boundaries, BTreeSet::from([1]));
    }

    #[test]
    fn matches_oracle_and_gold_on_mandarin() {
        for w in [samples::mandarin(), samples::mandarin_syllabic()] {
            for level in Level::ALL {
                let (c, gold) = extract(&w, samples::MANDARIN, level).unwrap();
                let m = AffixModel::train(&c);
                for g in &gold {
                    let h = m.segment(&g.tokens);
                    assert_eq!(h.boundaries, oracle(&c.words, &g.tokens));
                    assert_eq!(h.boundaries, g.boundaries, "{}", g);
                }
            }
        }
    }
}
