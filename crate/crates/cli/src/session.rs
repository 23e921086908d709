//! An editable, file-backed wordlist with row-level undo.

use std::collections::VecDeque;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use numorph_core::wordlist::{
    parse_wordlist, reannotate, serialize_wordlist, validate, Delimiter, ParseError,
    ValidationReport, WordForm, Wordlist,
};
use serde::Deserialize;
use thiserror::Error;

pub const UNDO_DEPTH: usize = 100;

/// New annotation fields for one row; absent fields keep their value.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct RowEdit {
    pub segments: Option<String>,
    pub cognates: Option<String>,
    pub morphemes: Option<String>,
}

#[derive(Debug, Error)]
pub enum EditError {
    #[error("unknown row {0:?}")]
    NotFound(String),
    #[error("{0}")]
    Parse(ParseError),
    /// The edit parses but SEGMENTS, COGNATES and MORPHEMES disagree in
    /// length.
    #[error("{0}")]
    Length(ParseError),
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("no file to save to")]
    NoPath,
}

#[derive(Debug, Clone)]
pub struct EditOutcome {
    pub revision: u64,
    pub row: WordForm,
    pub report: ValidationReport,
}

#[derive(Debug)]
pub struct Session {
    wordlist: Arc<Wordlist>,
    path: Option<PathBuf>,
    delimiter: Delimiter,
    dirty: bool,
    undo: VecDeque<WordForm>,
    revision: u64,
}

impl Session {
    pub fn new(wordlist: Wordlist, path: Option<PathBuf>, delimiter: Delimiter) -> Self {
        Session {
            wordlist: Arc::new(wordlist),
            path,
            delimiter,
            dirty: false,
            undo: VecDeque::new(),
            revision: 0,
        }
    }

    pub fn open(path: &Path, delimiter: Delimiter) -> Result<Self, SessionError> {
        let w = load(path, delimiter)?;
        Ok(Self::new(w, Some(path.to_path_buf()), delimiter))
    }

    /// Shared read-only view; later edits do not affect it.
    pub fn snapshot(&self) -> Arc<Wordlist> {
        Arc::clone(&self.wordlist)
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn undo_depth(&self) -> usize {
        self.undo.len()
    }

    pub fn edit(&mut self, id: &str, edit: &RowEdit) -> Result<EditOutcome, EditError> {
        let (index, old) = self
            .wordlist
            .rows()
            .iter()
            .enumerate()
            .find(|(_, r)| r.id == id)
            .ok_or_else(|| EditError::NotFound(id.to_string()))?;
        let segments = edit.segments.clone().unwrap_or_else(|| old.segments());
        let cognates = edit.cognates.clone().unwrap_or_else(|| old.cognates_field());
        let morphemes = edit.morphemes.clone().unwrap_or_else(|| old.morphemes_field());
        // header is line 1
        let row = reannotate(old, index + 2, &segments, &cognates, &morphemes).map_err(|e| {
            match e {
                ParseError::LengthMismatch { .. } => EditError::Length(e),
                e => EditError::Parse(e),
            }
        })?;
        let previous = self.replace(row.clone());
        self.undo.push_back(previous);
        if self.undo.len() > UNDO_DEPTH {
            self.undo.pop_front();
        }
        Ok(self.outcome(row))
    }

    /// Reverts the most recent edit still on the stack.
    pub fn undo(&mut self) -> Option<EditOutcome> {
        let previous = self.undo.pop_back()?;
        self.replace(previous.clone());
        Some(self.outcome(previous))
    }

    fn replace(&mut self, row: WordForm) -> WordForm {
        let mut w = (*self.wordlist).clone();
        let old = w.replace(row).expect("row exists");
        self.wordlist = Arc::new(w);
        self.revision += 1;
        self.dirty = true;
        old
    }

    fn outcome(&self, row: WordForm) -> EditOutcome {
        EditOutcome {
            revision: self.revision,
            row,
            report: validate(&self.wordlist),
        }
    }

    /// Writes the wordlist to `path` (or the session's file) through a
    /// temporary file in the same directory.
    pub fn save(&mut self, path: Option<&Path>) -> Result<PathBuf, SessionError> {
        let target = path
            .map(Path::to_path_buf)
            .or_else(|| self.path.clone())
            .ok_or(SessionError::NoPath)?;
        write_atomically(&self.wordlist, &target, self.delimiter)?;
        self.path = Some(target.clone());
        self.dirty = false;
        Ok(target)
    }
}

pub fn load(path: &Path, delimiter: Delimiter) -> Result<Wordlist, SessionError> {
    let file = File::open(path).map_err(|source| SessionError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_wordlist(BufReader::new(file), delimiter).map_err(|source| SessionError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn write_atomically(w: &Wordlist, path: &Path, delimiter: Delimiter) -> Result<(), SessionError> {
    let io = |source| SessionError::Io {
        path: path.to_path_buf(),
        source,
    };
    let name = path.file_name().map_or("wordlist".into(), |n| n.to_string_lossy());
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let file = File::create(&tmp).map_err(io)?;
    let mut out = BufWriter::new(file);
    serialize_wordlist(w, &mut out, delimiter).map_err(io)?;
    out.flush().map_err(io)?;
    drop(out);
    std::fs::rename(&tmp, path).map_err(io)
}
