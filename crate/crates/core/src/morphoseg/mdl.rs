//! Baseline minimum-description-length segmentation.
//!
//! Total cost = corpus cost + lexicon cost, in bits:
//! - corpus cost: every morph token `m` costs `-log2(count(m) / N)`, with `N`
//!   the number of morph tokens;
//! - lexicon cost: every distinct morph is spelled out segment by segment
//!   plus one end-of-morph symbol, each symbol costing `-log2 P(s)` under the
//!   symbol frequencies of the lexicon itself.
//!
//! Training visits each distinct word in a fixed order, removes its current
//! analysis and re-splits it recursively: a chunk is kept whole unless some
//! binary split is strictly cheaper, in which case both halves are re-split
//! in turn. Epochs repeat until the total cost improves by less than
//! `epsilon`.

use std::collections::HashMap;

use serde::Serialize;

use super::Segmenter;
use crate::segmentation::{SegmentationHypothesis, TrainingCorpus};

const END: u32 = u32::MAX;

/// Order in which distinct words are visited during each epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WordOrder {
    /// First appearance in the corpus.
    #[default]
    Corpus,
    /// Lexicographic on the token strings.
    Sorted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MdlConfig {
    pub order: WordOrder,
    pub epsilon: f64,
    pub max_epochs: usize,
}

impl Default for MdlConfig {
    fn default() -> Self {
        MdlConfig {
            order: WordOrder::Corpus,
            epsilon: 1e-6,
            max_epochs: 50,
        }
    }
}

fn xlogx(x: u64) -> f64 {
    if x == 0 {
        0.0
    } else {
        let x = x as f64;
        x * x.log2()
    }
}

/// Morph and symbol counts with running `x log x` sums, so both cost terms
/// update in time proportional to the morph length.
#[derive(Debug, Clone, Default)]
struct CostState {
    morphs: HashMap<Vec<u32>, u64>,
    tokens: u64,
    morph_xlogx: f64,
    symbols: HashMap<u32, u64>,
    symbol_total: u64,
    symbol_xlogx: f64,
}

impl CostState {
    fn corpus_cost(&self) -> f64 {
        xlogx(self.tokens) - self.morph_xlogx
    }

    fn lexicon_cost(&self) -> f64 {
        xlogx(self.symbol_total) - self.symbol_xlogx
    }

    fn total(&self) -> f64 {
        self.corpus_cost() + self.lexicon_cost()
    }

    fn bump_symbol(&mut self, s: u32, add: bool) {
        let n = self.symbols.entry(s).or_insert(0);
        let old = *n;
        *n = if add { old + 1 } else { old - 1 };
        let new = *n;
        if new == 0 {
            self.symbols.remove(&s);
        }
        self.symbol_xlogx += xlogx(new) - xlogx(old);
        if add {
            self.symbol_total += 1;
        } else {
            self.symbol_total -= 1;
        }
    }

    fn add(&mut self, morph: &[u32], count: u64) {
        let old = self.morphs.get(morph).copied().unwrap_or(0);
        let new = old + count;
        self.morphs.insert(morph.to_vec(), new);
        self.morph_xlogx += xlogx(new) - xlogx(old);
        self.tokens += count;
        if old == 0 {
            for &s in morph.iter().chain(std::iter::once(&END)) {
                self.bump_symbol(s, true);
            }
        }
    }

    fn remove(&mut self, morph: &[u32], count: u64) {
        let old = self.morphs[morph];
        let new = old - count;
        if new == 0 {
            self.morphs.remove(morph);
            for &s in morph.iter().chain(std::iter::once(&END)) {
                self.bump_symbol(s, false);
            }
        } else {
            self.morphs.insert(morph.to_vec(), new);
        }
        self.morph_xlogx += xlogx(new) - xlogx(old);
        self.tokens -= count;
    }

    /// Cost of one morph token under the frozen model; unseen morphs also
    /// pay for their lexicon entry.
    fn frozen_cost(&self, morph: &[u32]) -> f64 {
        let n = self.tokens.max(1) as f64;
        match self.morphs.get(morph) {
            Some(&c) => -(c as f64 / n).log2(),
            None => {
                let l = self.symbol_total as f64;
                let spell: f64 = morph
                    .iter()
                    .chain(std::iter::once(&END))
                    .map(|s| match self.symbols.get(s) {
                        Some(&k) => -(k as f64 / l).log2(),
                        None => (l + 1.0).log2(),
                    })
                    .sum();
                (n + 1.0).log2() + spell
            }
        }
    }
}

/// Recursive split of one chunk; `Split(at, left, right)` cuts before
/// relative position `at`.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Tree {
    Leaf,
    Split(usize, Box<Tree>, Box<Tree>),
}

impl Tree {
    fn leaves<'a>(&self, chunk: &'a [u32], out: &mut Vec<&'a [u32]>) {
        match self {
            Tree::Leaf => out.push(chunk),
            Tree::Split(at, l, r) => {
                l.leaves(&chunk[..*at], out);
                r.leaves(&chunk[*at..], out);
            }
        }
    }

    fn cuts(&self, offset: usize, out: &mut Vec<usize>) {
        if let Tree::Split(at, l, r) = self {
            l.cuts(offset, out);
            out.push(offset + at);
            r.cuts(offset + at, out);
        }
    }
}

#[derive(Debug, Clone)]
pub struct MdlModel {
    symbols: HashMap<String, u32>,
    state: CostState,
    analyses: HashMap<Vec<u32>, Tree>,
    epochs: usize,
}

/// Ties go to the unsplit chunk: a split must win by more than this.
const TIE: f64 = 1e-9;

impl MdlModel {
    pub fn train(corpus: &TrainingCorpus, config: MdlConfig) -> Self {
        let mut symbols = HashMap::new();
        let mut counts: Vec<(Vec<u32>, u64)> = Vec::new();
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut keys: Vec<&[String]> = Vec::new();
        for w in &corpus.words {
            let ids: Vec<u32> = w
                .iter()
                .map(|s| {
                    let next = symbols.len() as u32;
                    *symbols.entry(s.clone()).or_insert(next)
                })
                .collect();
            match index.get(&ids) {
                Some(&i) => counts[i].1 += 1,
                None => {
                    index.insert(ids.clone(), counts.len());
                    counts.push((ids, 1));
                    keys.push(w);
                }
            }
        }
        let mut order: Vec<usize> = (0..counts.len()).collect();
        if config.order == WordOrder::Sorted {
            order.sort_by(|&a, &b| keys[a].cmp(keys[b]));
        }

        let mut model = MdlModel {
            symbols,
            state: CostState::default(),
            analyses: HashMap::new(),
            epochs: 0,
        };
        for (w, c) in &counts {
            model.state.add(w, *c);
            model.analyses.insert(w.clone(), Tree::Leaf);
        }
        let mut cost = model.state.total();
        for _ in 0..config.max_epochs {
            model.epochs += 1;
            for &i in &order {
                let (word, count) = &counts[i];
                let old = model.analyses.remove(word).unwrap_or(Tree::Leaf);
                let mut leaves = Vec::new();
                old.leaves(word, &mut leaves);
                for m in leaves {
                    model.state.remove(m, *count);
                }
                let tree = model.resplit(word, *count);
                model.analyses.insert(word.clone(), tree);
            }
            let new = model.state.total();
            let improved = cost - new;
            cost = new;
            log::debug!("mdl epoch {}: cost {:.4}", model.epochs, cost);
            if improved < config.epsilon {
                break;
            }
        }
        model
    }

    fn resplit(&mut self, chunk: &[u32], count: u64) -> Tree {
        self.state.add(chunk, count);
        let mut best_cost = self.state.total();
        self.state.remove(chunk, count);
        let mut best = None;
        for at in 1..chunk.len() {
            let (l, r) = chunk.split_at(at);
            self.state.add(l, count);
            self.state.add(r, count);
            let c = self.state.total();
            self.state.remove(r, count);
            self.state.remove(l, count);
            if c < best_cost - TIE {
                best_cost = c;
                best = Some(at);
            }
        }
        match best {
            None => {
                self.state.add(chunk, count);
                Tree::Leaf
            }
            Some(at) => {
                let (l, r) = chunk.split_at(at);
                let left = self.resplit(l, count);
                let right = self.resplit(r, count);
                Tree::Split(at, Box::new(left), Box::new(right))
            }
        }
    }

    pub fn cost(&self) -> f64 {
        self.state.total()
    }

    pub fn corpus_cost(&self) -> f64 {
        self.state.corpus_cost()
    }

    pub fn lexicon_cost(&self) -> f64 {
        self.state.lexicon_cost()
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }

    /// Distinct morphs with their token counts, as segment strings.
    pub fn lexicon(&self) -> Vec<(Vec<String>, u64)> {
        let names: HashMap<u32, &str> = self.symbols.iter().map(|(s, &i)| (i, s.as_str())).collect();
        let mut out: Vec<(Vec<String>, u64)> = self
            .state
            .morphs
            .iter()
            .map(|(m, &c)| (m.iter().map(|i| names[i].to_string()).collect(), c))
            .collect();
        out.sort();
        out
    }

    fn encode(&self, word: &[String]) -> Vec<u32> {
        // unseen segments get ids past the known range
        let mut fresh = self.symbols.len() as u32;
        let mut extra: HashMap<&str, u32> = HashMap::new();
        word.iter()
            .map(|s| match self.symbols.get(s) {
                Some(&i) => i,
                None => *extra.entry(s.as_str()).or_insert_with(|| {
                    fresh += 1;
                    fresh
                }),
            })
            .collect()
    }

    /// Lowest-cost segmentation under the frozen lexicon, preferring fewer
    /// pieces on ties.
    fn viterbi(&self, word: &[u32]) -> Vec<usize> {
        let n = word.len();
        let mut best: Vec<(f64, usize, usize)> = vec![(f64::INFINITY, usize::MAX, 0); n + 1];
        best[0] = (0.0, 0, 0);
        for end in 1..=n {
            for start in 0..end {
                let (c0, k0, _) = best[start];
                let c = c0 + self.state.frozen_cost(&word[start..end]);
                let k = k0 + 1;
                let (bc, bk, _) = best[end];
                if c < bc - TIE || ((c - bc).abs() <= TIE && k < bk) {
                    best[end] = (c, k, start);
                }
            }
        }
        let mut cuts = Vec::new();
        let mut at = n;
        while at > 0 {
            let start = best[at].2;
            if start > 0 {
                cuts.push(start);
            }
            at = start;
        }
        cuts
    }
}

impl Segmenter for MdlModel {
    fn segment(&self, word: &[String]) -> SegmentationHypothesis {
        let ids = self.encode(word);
        let cuts = match self.analyses.get(&ids) {
            Some(tree) => {
                let mut cuts = Vec::new();
                tree.cuts(0, &mut cuts);
                cuts
            }
            None => self.viterbi(&ids),
        };
        SegmentationHypothesis::new(word.to_vec(), cuts)
    }
}
