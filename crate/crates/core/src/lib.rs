//! Numeral-system morphology: an annotated wordlist format with inline
//! surface/underlying alignments, per-language statistics, unsupervised
//! segmenters and subword tokenizers, and boundary precision/recall
//! evaluation.

pub mod alignment;
pub mod evaluation;
pub mod metrics;
pub mod models;
pub mod morphoseg;
pub mod report;
pub mod samples;
pub mod segmentation;
pub mod subword;
pub mod wordlist;
