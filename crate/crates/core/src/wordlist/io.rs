use std::io::{Read, Write};

use thiserror::Error;

use super::token::{parse_segments, SegmentError};
use super::{WordForm, Wordlist};

pub const REQUIRED_COLUMNS: [&str; 8] = [
    "ID",
    "LANGUAGE",
    "CONCEPT",
    "VALUE",
    "FORM",
    "SEGMENTS",
    "COGNATES",
    "MORPHEMES",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delimiter {
    #[default]
    Tab,
    Comma,
}

impl Delimiter {
    fn byte(self) -> u8 {
        match self {
            Delimiter::Tab => b'\t',
            Delimiter::Comma => b',',
        }
    }
}

/// Errors while reading a wordlist. `row` is the 1-based line number in the
/// file, counting the header as line 1.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("missing required column(s): {}", .0.join(", "))]
    MissingColumns(Vec<String>),
    #[error("duplicate column {0:?}")]
    DuplicateColumn(String),
    #[error("row {row}: SEGMENTS {source}")]
    Segments {
        row: usize,
        #[source]
        source: SegmentError,
    },
    #[error("row {row}: malformed integer {text:?} in {column}")]
    Integer {
        row: usize,
        column: &'static str,
        text: String,
    },
    #[error("row {row}: cognate IDs must be positive, got {id}")]
    NonPositiveCognate { row: usize, id: i64 },
    #[error("row {row}: {morphs} morphs but {cognates} cognate IDs and {glosses} glosses")]
    LengthMismatch {
        row: usize,
        morphs: usize,
        cognates: usize,
        glosses: usize,
    },
    #[error("row {row}: empty {column}")]
    EmptyField { row: usize, column: &'static str },
    #[error("row {row}: duplicate row ID {id:?}")]
    DuplicateId { row: usize, id: String },
    #[error("row {row}: {source}")]
    Csv {
        row: usize,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ParseError {
    pub fn row(&self) -> Option<usize> {
        match self {
            ParseError::Segments { row, .. }
            | ParseError::Integer { row, .. }
            | ParseError::NonPositiveCognate { row, .. }
            | ParseError::LengthMismatch { row, .. }
            | ParseError::EmptyField { row, .. }
            | ParseError::DuplicateId { row, .. }
            | ParseError::Csv { row, .. } => Some(*row),
            _ => None,
        }
    }
}

/// Parses the COGNATES field: space-separated positive integers.
pub(crate) fn parse_cognates(text: &str, row: usize) -> Result<Vec<u32>, ParseError> {
    text.split_whitespace()
        .map(|t| {
            let id: i64 = t.parse().map_err(|_| ParseError::Integer {
                row,
                column: "COGNATES",
                text: t.to_string(),
            })?;
            if id <= 0 {
                return Err(ParseError::NonPositiveCognate { row, id });
            }
            u32::try_from(id).map_err(|_| ParseError::Integer {
                row,
                column: "COGNATES",
                text: t.to_string(),
            })
        })
        .collect()
}

/// Parses SEGMENTS/COGNATES/MORPHEMES into a row, enforcing the length
/// invariant.
pub(crate) fn build_row(
    row: usize,
    base: WordForm,
    segments: &str,
    cognates: &str,
    morphemes: &str,
) -> Result<WordForm, ParseError> {
    let morphs = parse_segments(segments).map_err(|source| ParseError::Segments { row, source })?;
    let cognates = parse_cognates(cognates, row)?;
    let glosses: Vec<String> = morphemes.split_whitespace().map(str::to_string).collect();
    if morphs.len() != cognates.len() || morphs.len() != glosses.len() {
        return Err(ParseError::LengthMismatch {
            row,
            morphs: morphs.len(),
            cognates: cognates.len(),
            glosses: glosses.len(),
        });
    }
    Ok(WordForm {
        morphs,
        cognates,
        glosses,
        ..base
    })
}

/// Replaces a row's SEGMENTS, COGNATES and MORPHEMES fields, re-parsing
/// them. `line` is the row's line in the file, used in error messages.
pub fn reannotate(
    row: &WordForm,
    line: usize,
    segments: &str,
    cognates: &str,
    morphemes: &str,
) -> Result<WordForm, ParseError> {
    build_row(line, row.clone(), segments, cognates, morphemes)
}

pub fn parse_wordlist<R: Read>(reader: R, delimiter: Delimiter) -> Result<Wordlist, ParseError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter.byte())
        .quoting(delimiter == Delimiter::Comma)
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|source| ParseError::Csv { row: 1, source })?
        .clone();
    let names: Vec<String> = headers.iter().map(|h| h.trim().to_string()).collect();
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(ParseError::DuplicateColumn(n.clone()));
        }
    }
    let col = |name: &str| names.iter().position(|h| h == name);
    let missing: Vec<String> = REQUIRED_COLUMNS
        .iter()
        .filter(|c| col(c).is_none())
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(ParseError::MissingColumns(missing));
    }
    let idx: Vec<usize> = REQUIRED_COLUMNS.iter().map(|c| col(c).unwrap()).collect();
    let extra_idx: Vec<usize> = (0..names.len()).filter(|i| !idx.contains(i)).collect();
    let extra_columns: Vec<String> = extra_idx.iter().map(|&i| names[i].clone()).collect();

    let mut rows: Vec<WordForm> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (n, record) in rdr.records().enumerate() {
        let row = n + 2;
        let record = record.map_err(|source| ParseError::Csv { row, source })?;
        let field = |k: usize| record.get(idx[k]).unwrap_or("").trim();
        let id = field(0).to_string();
        for (k, name) in [(0, "ID"), (1, "LANGUAGE"), (5, "SEGMENTS")] {
            if field(k).is_empty() {
                return Err(ParseError::EmptyField { row, column: name });
            }
        }
        if !seen.insert(id.clone()) {
            return Err(ParseError::DuplicateId { row, id });
        }
        let value = field(3).parse().map_err(|_| ParseError::Integer {
            row,
            column: "VALUE",
            text: field(3).to_string(),
        })?;
        let base = WordForm {
            id,
            language: field(1).to_string(),
            concept: field(2).to_string(),
            value,
            form: field(4).to_string(),
            morphs: Vec::new(),
            cognates: Vec::new(),
            glosses: Vec::new(),
            extra: extra_idx
                .iter()
                .map(|&i| (names[i].clone(), record.get(i).unwrap_or("").to_string()))
                .collect(),
        };
        rows.push(build_row(row, base, field(5), field(6), field(7))?);
    }
    Ok(Wordlist::with_columns(rows, extra_columns))
}

/// Writes the required columns in canonical order, followed by any extra
/// columns.
pub fn serialize_wordlist<W: Write>(
    w: &Wordlist,
    writer: W,
    delimiter: Delimiter,
) -> Result<(), std::io::Error> {
    let mut wtr = csv::WriterBuilder::new()
        .delimiter(delimiter.byte())
        .quote_style(match delimiter {
            Delimiter::Tab => csv::QuoteStyle::Never,
            Delimiter::Comma => csv::QuoteStyle::Necessary,
        })
        .from_writer(writer);
    let mut header: Vec<&str> = REQUIRED_COLUMNS.to_vec();
    header.extend(w.extra_columns().iter().map(String::as_str));
    wtr.write_record(&header)?;
    for r in w.rows() {
        let mut rec = vec![
            r.id.clone(),
            r.language.clone(),
            r.concept.clone(),
            r.value.to_string(),
            r.form.clone(),
            r.segments(),
            r.cognates_field(),
            r.morphemes_field(),
        ];
        for name in w.extra_columns() {
            let v = r.extra.iter().find(|(k, _)| k == name).map(|(_, v)| v.clone());
            rec.push(v.unwrap_or_default());
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::TABLE2_TSV;

    fn parse(s: &str) -> Result<Wordlist, ParseError> {
        parse_wordlist(s.as_bytes(), Delimiter::Tab)
    }

    #[test]
    fn table2_sample_parses() {
        let w = parse(TABLE2_TSV).unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(w.languages().count(), 2);
    }

    #[test]
    fn header_only_is_empty() {
        let w = parse("ID\tLANGUAGE\tCONCEPT\tVALUE\tFORM\tSEGMENTS\tCOGNATES\tMORPHEMES\n").unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn length_mismatch_names_row() {
        let s = "ID\tLANGUAGE\tCONCEPT\tVALUE\tFORM\tSEGMENTS\tCOGNATES\tMORPHEMES\n\
                 a\tx\tone\t1\ta\ta\t1\tONE\n\
                 b\tx\tbad\t3\tabc\ta + b + c\t1 2\tA B C\n";
        match parse(s).unwrap_err() {
            ParseError::LengthMismatch {
                row,
                morphs,
                cognates,
                ..
            } => {
                assert_eq!(row, 3);
                assert_eq!((morphs, cognates), (3, 2));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn missing_columns_reported() {
        let e = parse("ID\tLANGUAGE\tSEGMENTS\n").unwrap_err();
        match e {
            ParseError::MissingColumns(cols) => {
                assert_eq!(cols, ["CONCEPT", "VALUE", "FORM", "COGNATES", "MORPHEMES"])
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn malformed_integers() {
        let head = "ID\tLANGUAGE\tCONCEPT\tVALUE\tFORM\tSEGMENTS\tCOGNATES\tMORPHEMES\n";
        let e = parse(&format!("{head}a\tx\tone\tone\ta\ta\t1\tONE\n")).unwrap_err();
        assert!(matches!(e, ParseError::Integer { row: 2, column: "VALUE", .. }));
        let e = parse(&format!("{head}a\tx\tone\t1\ta\ta\tx1\tONE\n")).unwrap_err();
        assert!(matches!(e, ParseError::Integer { row: 2, column: "COGNATES", .. }));
        let e = parse(&format!("{head}a\tx\tone\t1\ta\ta\t0\tONE\n")).unwrap_err();
        assert!(matches!(e, ParseError::NonPositiveCognate { row: 2, id: 0 }));
    }

    #[test]
    fn segment_errors_carry_row_and_column() {
        let head = "ID\tLANGUAGE\tCONCEPT\tVALUE\tFORM\tSEGMENTS\tCOGNATES\tMORPHEMES\n";
        let e = parse(&format!("{head}a\tx\tone\t1\ta\ta -/-\t1\tONE\n")).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("row 2") && msg.contains("column 3"), "{msg}");
    }

    #[test]
    fn comma_delimited_with_extra_columns() {
        let s = "ID,LANGUAGE,CONCEPT,VALUE,FORM,SEGMENTS,COGNATES,MORPHEMES,NOTE\n\
                 a,x,one,1,a,a,1,ONE,\"hello, world\"\n";
        let w = parse_wordlist(s.as_bytes(), Delimiter::Comma).unwrap();
        assert_eq!(w.extra_columns(), ["NOTE"]);
        let mut out = Vec::new();
        serialize_wordlist(&w, &mut out, Delimiter::Comma).unwrap();
        let again = parse_wordlist(out.as_slice(), Delimiter::Comma).unwrap();
        assert_eq!(again, w);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let head = "ID\tLANGUAGE\tCONCEPT\tVALUE\tFORM\tSEGMENTS\tCOGNATES\tMORPHEMES\n";
        let e = parse(&format!("{head}a\tx\tone\t1\ta\ta\t1\tONE\na\tx\tone\t1\ta\ta\t1\tONE\n"))
            .unwrap_err();
        assert!(matches!(e, ParseError::DuplicateId { row: 3, .. }));
    }
}
