//! Per-language numeral-system statistics and rank correlations between them.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::wordlist::{WordForm, Wordlist};

/// Significance level reported next to every correlation.
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageStats {
    pub morphs_surface: usize,
    pub morphemes_underlying: usize,
    pub expressivity_surface: f64,
    pub expressivity_underlying: f64,
    pub opacity: f64,
    pub avg_code_length: f64,
    pub ttr: f64,
    /// Bits.
    pub entropy: f64,
    /// Weighted morph token count the ratios are built from.
    pub weighted_tokens: f64,
    pub distinct_values: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("unknown language {0:?}")]
    UnknownLanguage(String),
}

/// Number of alternative forms per numeral value.
fn alternatives<'a>(forms: impl IntoIterator<Item = &'a WordForm>) -> HashMap<i64, usize> {
    let mut k = HashMap::new();
    for f in forms {
        *k.entry(f.value).or_insert(0) += 1;
    }
    k
}

/// Morph tokens over all forms, each word weighted by `1/k` where `k` is the
/// number of alternative forms sharing its value.
pub fn weighted_token_count<'a>(forms: impl IntoIterator<Item = &'a WordForm> + Clone) -> f64 {
    let k = alternatives(forms.clone());
    forms
        .into_iter()
        .map(|f| f.morphs.len() as f64 / k[&f.value] as f64)
        .sum()
}

pub fn compute_stats(w: &Wordlist, language: &str) -> Result<LanguageStats, MetricsError> {
    if !w.has_language(language) {
        return Err(MetricsError::UnknownLanguage(language.to_string()));
    }
    let forms: Vec<&WordForm> = w.language_rows(language).collect();
    let k = alternatives(forms.iter().copied());
    let mut surface: BTreeSet<(u32, Vec<&str>)> = BTreeSet::new();
    let mut class_weight: BTreeMap<u32, f64> = BTreeMap::new();
    let mut total = 0.0;
    for f in &forms {
        let weight = 1.0 / k[&f.value] as f64;
        for (m, &cog) in f.morphs.iter().zip(&f.cognates) {
            surface.insert((cog, m.surface_form()));
            *class_weight.entry(cog).or_insert(0.0) += weight;
            total += weight;
        }
    }
    let morphs = surface.len();
    let morphemes = class_weight.len();
    let values = k.len();
    let entropy = class_weight
        .values()
        .map(|&c| c / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0);
    Ok(LanguageStats {
        morphs_surface: morphs,
        morphemes_underlying: morphemes,
        expressivity_surface: total / morphs as f64,
        expressivity_underlying: total / morphemes as f64,
        opacity: morphs as f64 / morphemes as f64,
        avg_code_length: total / values as f64,
        ttr: morphemes as f64 / total,
        entropy,
        weighted_tokens: total,
        distinct_values: values,
    })
}

/// Stats for every language, in sorted language order.
pub fn all_stats(w: &Wordlist) -> Vec<(String, LanguageStats)> {
    w.languages()
        .map(|l| (l.to_string(), compute_stats(w, l).expect("language listed")))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub rho: f64,
    pub p: f64,
    pub n: usize,
}

impl Correlation {
    pub fn significant(&self) -> bool {
        self.p < ALPHA
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorrelationError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 observations, got {0}")]
    TooFew(usize),
    #[error("rho is undefined for constant input")]
    ConstantInput,
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho (Pearson correlation of average ranks) with a two-sided p
/// value from the t approximation on `n - 2` degrees of freedom.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Correlation, CorrelationError> {
    if x.len() != y.len() {
        return Err(CorrelationError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(CorrelationError::TooFew(n));
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let mean = (n as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean).powi(2);
        syy += (b - mean).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(CorrelationError::ConstantInput);
    }
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = n as f64 - 2.0;
    let p = if (1.0 - rho.abs()) < 1e-12 || df <= 0.0 {
        if df <= 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
        (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
    };
    Ok(Correlation { rho, p, n })
}

/// Named metric used in the correlation report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MorphsSurface,
    MorphemesUnderlying,
    ExpressivitySurface,
    ExpressivityUnderlying,
    Opacity,
    CodeLength,
    Ttr,
    Entropy,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::MorphsSurface => "morphs (S)",
            Metric::MorphemesUnderlying => "morphemes (U)",
            Metric::ExpressivitySurface => "expressivity (S)",
            Metric::ExpressivityUnderlying => "expressivity (U)",
            Metric::Opacity => "opacity",
            Metric::CodeLength => "code length",
            Metric::Ttr => "TTR",
            Metric::Entropy => "entropy",
        }
    }

    pub fn of(self, s: &LanguageStats) -> f64 {
        match self {
            Metric::MorphsSurface => s.morphs_surface as f64,
            Metric::MorphemesUnderlying => s.morphemes_underlying as f64,
            Metric::ExpressivitySurface => s.expressivity_surface,
            Metric::ExpressivityUnderlying => s.expressivity_underlying,
            Metric::Opacity => s.opacity,
            Metric::CodeLength => s.avg_code_length,
            Metric::Ttr => s.ttr,
            Metric::Entropy => s.entropy,
        }
    }
}

/// Metric pairs examined across languages.
pub const CORRELATION_PAIRS: [(Metric, Metric); 8] = [
    (Metric::Opacity, Metric::MorphemesUnderlying),
    (Metric::ExpressivitySurface, Metric::MorphemesUnderlying),
    (Metric::ExpressivityUnderlying, Metric::MorphemesUnderlying),
    (Metric::CodeLength, Metric::MorphemesUnderlying),
    (Metric::CodeLength, Metric::ExpressivitySurface),
    (Metric::CodeLength, Metric::ExpressivityUnderlying),
    (Metric::Ttr, Metric::MorphemesUnderlying),
    (Metric::Entropy, Metric::MorphemesUnderlying),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub x: Metric,
    pub y: Metric,
    pub result: Result<Correlation, String>,
}

pub fn correlation_report(stats: &[(String, LanguageStats)]) -> Vec<CorrelationRow> {
    CORRELATION_PAIRS
        .iter()
        .map(|&(a, b)| {
            let x: Vec<f64> = stats.iter().map(|(_, s)| a.of(s)).collect();
            let y: Vec<f64> = stats.iter().map(|(_, s)| b.of(s)).collect();
            CorrelationRow {
                x: a,
                y: b,
                result: spearman(&x, &y).map_err(|e| e.to_string()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::wordlist::parse_segments;

    fn word(value: i64, segments: &str, cognates: &[u32]) -> WordForm {
        WordForm {
            id: format!("{value}-{segments}"),
            language: "x".into(),
            concept: value.to_string(),
            value,
            form: String::new(),
            morphs: parse_segments(segments).unwrap(),
            cognates: cognates.to_vec(),
            glosses: cognates.iter().map(|c| format!("G{c}")).collect(),
            extra: vec![],
        }
    }

    #[test]
    fn mandarin_weighted_tokens() {
        let w = samples::mandarin();
        assert_eq!(weighted_token_count(w.rows()), 88.0);
    }

    #[test]
    fn one_word_one_morph() {
        let w = word(1, "a", &[1]);
        assert_eq!(weighted_token_count([&w]), 1.0);
    }

    #[test]
    fn alternative_forms_share_weight() {
        let a = word(21, "a + b + c", &[1, 2, 3]);
        let b = word(21, "d + e + f", &[4, 5, 6]);
        assert_eq!(weighted_token_count([&a, &b]), 3.0);
    }

    #[test]
    fn mandarin_stats() {
        let s = compute_stats(&samples::mandarin(), samples::MANDARIN).unwrap();
        assert_eq!((s.morphs_surface, s.morphemes_underlying), (10, 10));
        assert!((s.expressivity_surface - 8.8).abs() < 1e-12);
        assert!((s.expressivity_underlying - 8.8).abs() < 1e-12);
        assert_eq!(s.opacity, 1.0);
        assert!((s.avg_code_length - 2.2).abs() < 1e-12);
    }

    #[test]
    fn single_monomorphemic_word() {
        let w = Wordlist::new(vec![word(1, "a b", &[1])]);
        let s = compute_stats(&w, "x").unwrap();
        assert_eq!(s.expressivity_surface, 1.0);
        assert_eq!(s.expressivity_underlying, 1.0);
        assert_eq!(s.opacity, 1.0);
        assert_eq!(s.avg_code_length, 1.0);
        assert_eq!(s.ttr, 1.0);
        assert_eq!(s.entropy, 0.0);
    }

    #[test]
    fn allomorphy_raises_opacity() {
        let s = compute_stats(&samples::table2(), "stan1295").unwrap();
        // ONE TWO THREE and TWEN, TY as ts I ç and s I ç
        assert_eq!((s.morphs_surface, s.morphemes_underlying), (7, 6));
        assert_eq!(s.weighted_tokens, 11.0);
        assert!((s.opacity - 7.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_language() {
        assert!(compute_stats(&samples::table2(), "nope").is_err());
    }

    #[test]
    fn entropy_of_uniform_classes() {
        let w = Wordlist::new(vec![word(1, "a", &[1]), word(2, "b", &[2]), word(3, "c + d", &[3, 4])]);
        let s = compute_stats(&w, "x").unwrap();
        assert!((s.entropy - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_perfect() {
        let c = spearman(&[1., 2., 3., 4.], &[10., 20., 30., 40.]).unwrap();
        assert_eq!(c.rho, 1.0);
        assert_eq!(c.p, 0.0);
        let c = spearman(&[1., 2., 3., 4.], &[4., 3., 2., 1.]).unwrap();
        assert_eq!(c.rho, -1.0);
    }

    #[test]
    fn spearman_hand_ranked() {
        // sum d^2 = 4, rho = 1 - 6*4/(5*24)
        let c = spearman(&[1., 2., 3., 4., 5.], &[1., 3., 2., 5., 4.]).unwrap();
        assert!((c.rho - 0.8).abs() < 1e-12);
        // t = 0.8 * sqrt(3 / 0.36); two-sided p on 3 df, as scipy reports
        assert!((c.p - 0.104_088_04).abs() < 1e-6, "{}", c.p);
        assert!(!c.significant());
    }

    #[test]
    fn spearman_errors() {
        assert_eq!(spearman(&[1., 2., 3.], &[1., 2.]), Err(CorrelationError::LengthMismatch(3, 2)));
        assert_eq!(spearman(&[1., 2.], &[1., 2.]), Err(CorrelationError::TooFew(2)));
        assert_eq!(spearman(&[1., 1., 1.], &[1., 2., 3.]), Err(CorrelationError::ConstantInput));
    }

    #[test]
    fn ties_get_average_rank() {
        assert_eq!(average_ranks(&[3., 1., 3., 2.]), [3.5, 1.0, 3.5, 2.0]);
    }
}
