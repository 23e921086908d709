//! Unsupervised morpheme segmentation: predictability-based cutters (LSV
//! family), the affix model and baseline MDL.

mod affix;
mod lsv;
mod mdl;
mod trie;

pub use affix::AffixModel;
pub use lsv::{peaks, Combine, Direction, LsvConfig, LsvModel};
pub use mdl::{MdlConfig, MdlModel, WordOrder};
pub use trie::{PrefixStatistics, Statistic};

use crate::segmentation::SegmentationHypothesis;

/// A trained model that proposes cut positions for a flat token sequence.
/// Segmenting is read-only, so trained models can be shared across threads.
pub trait Segmenter: Send + Sync {
    fn segment(&self, word: &[String]) -> SegmentationHypothesis;
}
