//! Continuation counts over token sequences.
//!
//! Each node stores how many corpus word types continue with each token, and
//! how many end there. Built over reversed words, the same structure gives
//! predecessor counts, with "end" read as "start of word".

use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
struct Node {
    children: BTreeMap<String, usize>,
    counts: BTreeMap<String, u32>,
    end: u32,
    total: u32,
}

#[derive(Debug, Clone)]
pub struct PrefixStatistics {
    nodes: Vec<Node>,
}

impl Default for PrefixStatistics {
    fn default() -> Self {
        PrefixStatistics {
            nodes: vec![Node::default()],
        }
    }
}

impl PrefixStatistics {
    /// Counts each distinct word once.
    pub fn from_types<'a>(words: impl IntoIterator<Item = &'a [String]>) -> Self {
        let mut trie = Self::default();
        for w in words {
            trie.insert(w.iter().map(String::as_str));
        }
        trie
    }

    pub fn from_reversed_types<'a>(words: impl IntoIterator<Item = &'a [String]>) -> Self {
        let mut trie = Self::default();
        for w in words {
            trie.insert(w.iter().rev().map(String::as_str));
        }
        trie
    }

    pub fn insert<'a>(&mut self, word: impl IntoIterator<Item = &'a str>) {
        let mut at = 0;
        for tok in word {
            let next = match self.nodes[at].children.get(tok) {
                Some(&n) => n,
                None => {
                    self.nodes.push(Node::default());
                    let n = self.nodes.len() - 1;
                    self.nodes[at].children.insert(tok.to_string(), n);
                    n
                }
            };
            let node = &mut self.nodes[at];
            *node.counts.entry(tok.to_string()).or_insert(0) += 1;
            node.total += 1;
            at = next;
        }
        self.nodes[at].end += 1;
        self.nodes[at].total += 1;
    }

    fn find<'a>(&self, path: impl IntoIterator<Item = &'a str>) -> Option<&Node> {
        let mut at = 0;
        for tok in path {
            at = *self.nodes[at].children.get(tok)?;
        }
        Some(&self.nodes[at])
    }

    /// Continuation counts after `path`, the end-of-word count last (only if
    /// non-zero). Empty when the path never occurs.
    pub fn continuations<'a>(&self, path: impl IntoIterator<Item = &'a str>) -> Vec<u32> {
        match self.find(path) {
            Some(n) => {
                let mut c: Vec<u32> = n.counts.values().copied().collect();
                if n.end > 0 {
                    c.push(n.end);
                }
                c
            }
            None => Vec::new(),
        }
    }

    /// Checks that every node total equals its continuation counts plus its
    /// end count, and that counts agree with child subtree totals.
    pub fn is_consistent(&self) -> bool {
        self.nodes.iter().all(|n| {
            let sum: u32 = n.counts.values().sum();
            sum + n.end == n.total
                && n.children
                    .iter()
                    .all(|(tok, &c)| n.counts.get(tok) == Some(&self.nodes[c].total))
        })
    }
}

/// Which quantity is read off a continuation distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    /// Number of distinct continuations.
    Variety,
    /// Shannon entropy in bits.
    Entropy,
    /// One minus the probability of the most likely continuation.
    MaxDrop,
}

impl Statistic {
    pub fn score(self, counts: &[u32]) -> f64 {
        let total: u32 = counts.iter().sum();
        if total == 0 {
            return 0.0;
        }
        let total = f64::from(total);
        match self {
            Statistic::Variety => counts.iter().filter(|&&c| c > 0).count() as f64,
            Statistic::Entropy => counts
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| {
                    let p = f64::from(c) / total;
                    -p * p.log2()
                })
                .sum::<f64>()
                .max(0.0),
            Statistic::MaxDrop => {
                1.0 - f64::from(counts.iter().copied().max().unwrap_or(0)) / total
            }
        }
    }
}
