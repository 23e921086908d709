//! Annotated numeral wordlists: rows of segmented, cognate-coded and glossed
//! word forms.

mod io;
mod token;
mod validate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use io::{
    parse_wordlist, reannotate, serialize_wordlist, Delimiter, ParseError, REQUIRED_COLUMNS,
};
pub use token::{
    parse_segments, parse_token, serialize_segments, Level, Morph, SegmentError, SoundToken,
    TokenErrorKind, BOUNDARY, GAP,
};
pub use validate::{validate, Severity, ValidationReport, Violation, ViolationKind};

/// One annotated numeral word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordForm {
    pub id: String,
    pub language: String,
    pub concept: String,
    pub value: i64,
    pub form: String,
    pub morphs: Vec<Morph>,
    pub cognates: Vec<u32>,
    pub glosses: Vec<String>,
    /// Columns beyond the required set, in file order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<(String, String)>,
}

impl WordForm {
    pub fn segments(&self) -> String {
        serialize_segments(&self.morphs)
    }

    pub fn cognates_field(&self) -> String {
        join(&self.cognates)
    }

    pub fn morphemes_field(&self) -> String {
        self.glosses.join(" ")
    }

    /// Flat gap-stripped tokens at `level`, plus the cut positions between
    /// morphs. Morphs with an empty projection contribute no cut.
    pub fn projection(&self, level: Level) -> (Vec<String>, Vec<usize>) {
        let mut tokens = Vec::new();
        let mut cuts = Vec::new();
        for morph in &self.morphs {
            let part = morph.projection(level);
            if part.is_empty() {
                continue;
            }
            if !tokens.is_empty() {
                cuts.push(tokens.len());
            }
            tokens.extend(part.into_iter().map(str::to_string));
        }
        (tokens, cuts)
    }

    /// Renames every segment bijectively; cognates and glosses untouched.
    pub fn map_segments(&self, mut f: impl FnMut(&str) -> String) -> WordForm {
        WordForm {
            morphs: self.morphs.iter().map(|m| m.map_segments(&mut f)).collect(),
            ..self.clone()
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// An ordered collection of word forms with a per-language index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Wordlist {
    rows: Vec<WordForm>,
    #[serde(skip)]
    by_language: BTreeMap<String, Vec<usize>>,
    /// Extra column names, in the order they appeared in the source header.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    extra_columns: Vec<String>,
}

impl Wordlist {
    pub fn new(rows: Vec<WordForm>) -> Self {
        let mut extra_columns: Vec<String> = Vec::new();
        for row in &rows {
            for (k, _) in &row.extra {
                if !extra_columns.contains(k) {
                    extra_columns.push(k.clone());
                }
            }
        }
        Self::with_columns(rows, extra_columns)
    }

    pub(crate) fn with_columns(rows: Vec<WordForm>, extra_columns: Vec<String>) -> Self {
        let mut by_language: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            by_language.entry(row.language.clone()).or_default().push(i);
        }
        Wordlist {
            rows,
            by_language,
            extra_columns,
        }
    }

    pub fn rows(&self) -> &[WordForm] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn extra_columns(&self) -> &[String] {
        &self.extra_columns
    }

    /// Languages in sorted order.
    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.by_language.keys().map(String::as_str)
    }

    pub fn has_language(&self, language: &str) -> bool {
        self.by_language.contains_key(language)
    }

    /// Rows of one language in file order.
    pub fn language_rows<'a>(&'a self, language: &str) -> impl Iterator<Item = &'a WordForm> + 'a {
        self.by_language
            .get(language)
            .into_iter()
            .flatten()
            .map(|&i| &self.rows[i])
    }

    pub fn get(&self, id: &str) -> Option<&WordForm> {
        self.rows.iter().find(|r| r.id == id)
    }

    /// Replaces the row with the same id. Returns the previous row.
    pub fn replace(&mut self, row: WordForm) -> Option<WordForm> {
        let idx = self.rows.iter().position(|r| r.id == row.id)?;
        let language_changed = self.rows[idx].language != row.language;
        let old = std::mem::replace(&mut self.rows[idx], row);
        if language_changed {
            *self = Self::with_columns(std::mem::take(&mut self.rows), std::mem::take(&mut self.extra_columns));
        }
        Some(old)
    }

    pub fn map_segments(&self, mut f: impl FnMut(&str) -> String) -> Wordlist {
        let rows = self.rows.iter().map(|r| r.map_segments(&mut f)).collect();
        Self::with_columns(rows, self.extra_columns.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn twenty_one_surface_projection() {
        let w = samples::table2();
        let row = w.get("german-21").unwrap();
        let (tokens, cuts) = row.projection(Level::Surface);
        assert_eq!(
            tokens,
            ["aI", "n", "s", "U", "n", "ts", "v", "a", "n", "ts", "I", "ç"]
        );
        assert_eq!(cuts, [3, 5, 9]);
    }

    #[test]
    fn twenty_one_underlying_projection() {
        let w = samples::table2();
        let row = w.get("german-21").unwrap();
        let (tokens, cuts) = row.projection(Level::Underlying);
        assert_eq!(
            tokens,
            ["aI", "n", "U", "n", "d", "ts", "v", "a", "n", "ts", "I", "ç"]
        );
        assert_eq!(cuts, [2, 5, 9]);
    }

    #[test]
    fn language_index() {
        let w = samples::table2();
        assert_eq!(w.languages().collect::<Vec<_>>(), ["stan1290", "stan1295"]);
        assert_eq!(w.language_rows("stan1295").count(), 5);
        assert_eq!(w.language_rows("nope").count(), 0);
    }

    #[test]
    fn replace_keeps_index_consistent() {
        let mut w = samples::table2();
        let mut row = w.get("french-1").unwrap().clone();
        row.language = "xxxx0000".into();
        assert!(w.replace(row).is_some());
        assert_eq!(w.language_rows("xxxx0000").count(), 1);
        assert_eq!(w.language_rows("stan1290").count(), 4);
    }
}
