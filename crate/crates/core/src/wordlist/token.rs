//! Sound tokens and morphs in inline-alignment notation.
//!
//! A token is either a plain segment (`n`) or a surface/underlying pair
//! written `surface/underlying`, where `-` on either side marks a gap.
//! Tokens are separated by single spaces, morphs by ` + `.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub const GAP: &str = "-";
pub const BOUNDARY: &str = "+";

/// Why a single token or a segment string failed to parse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenErrorKind {
    #[error("empty token")]
    Empty,
    #[error("empty side in aligned pair")]
    EmptySide,
    #[error("more than one '/' in token")]
    TooManySlashes,
    #[error("both sides of the pair are gaps")]
    DoubleGap,
    #[error("whitespace inside token")]
    Whitespace,
    #[error("bare '+' or '-' is not a segment")]
    ReservedSymbol,
    #[error("empty morph")]
    EmptyMorph,
    #[error("tokens must be separated by single spaces")]
    Spacing,
}

/// A parse error with a 1-based character column inside the segment string.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {kind} in {text:?}")]
pub struct SegmentError {
    pub column: usize,
    pub text: String,
    pub kind: TokenErrorKind,
}

/// One transcription token. `None` on a side is a gap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SoundToken {
    surface: Option<String>,
    underlying: Option<String>,
}

impl SoundToken {
    pub fn plain(segment: impl AsRef<str>) -> Self {
        let s = normalize(segment.as_ref());
        SoundToken {
            surface: Some(s.clone()),
            underlying: Some(s),
        }
    }

    /// Builds an aligned pair. Returns `None` when both sides are gaps.
    pub fn pair(surface: Option<&str>, underlying: Option<&str>) -> Option<Self> {
        if surface.is_none() && underlying.is_none() {
            return None;
        }
        Some(SoundToken {
            surface: surface.map(normalize),
            underlying: underlying.map(normalize),
        })
    }

    pub fn surface(&self) -> Option<&str> {
        self.surface.as_deref()
    }

    pub fn underlying(&self) -> Option<&str> {
        self.underlying.as_deref()
    }

    pub fn is_plain(&self) -> bool {
        self.surface.is_some() && self.surface == self.underlying
    }

    /// Checks the type invariants for tokens built outside the parser.
    pub fn check(&self) -> Result<(), TokenErrorKind> {
        if self.surface.is_none() && self.underlying.is_none() {
            return Err(TokenErrorKind::DoubleGap);
        }
        for side in [&self.surface, &self.underlying].into_iter().flatten() {
            if side.is_empty() {
                return Err(TokenErrorKind::EmptySide);
            }
            if side.chars().any(char::is_whitespace) {
                return Err(TokenErrorKind::Whitespace);
            }
            if side.contains('/') || side.contains('+') {
                return Err(TokenErrorKind::ReservedSymbol);
            }
        }
        Ok(())
    }
}

impl fmt::Display for SoundToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_plain() {
            return f.write_str(&escape(self.surface.as_deref().unwrap_or_default()));
        }
        let side = |s: &Option<String>| s.as_deref().map_or_else(|| GAP.to_string(), escape);
        write!(f, "{}/{}", side(&self.surface), side(&self.underlying))
    }
}

fn normalize(s: &str) -> String {
    s.nfc().collect()
}

fn escape(segment: &str) -> String {
    if segment == GAP {
        "\\-".to_string()
    } else {
        segment.to_string()
    }
}

fn parse_side(text: &str) -> Result<Option<String>, TokenErrorKind> {
    match text {
        "" => Err(TokenErrorKind::EmptySide),
        GAP => Ok(None),
        "\\-" => Ok(Some(GAP.to_string())),
        BOUNDARY => Err(TokenErrorKind::ReservedSymbol),
        s => Ok(Some(normalize(s))),
    }
}

/// Parses `a`, `a/b`, `a/-` or `-/b`. A literal hyphen segment is written `\-`.
pub fn parse_token(text: &str) -> Result<SoundToken, TokenErrorKind> {
    if text.is_empty() {
        return Err(TokenErrorKind::Empty);
    }
    if text.chars().any(char::is_whitespace) {
        return Err(TokenErrorKind::Whitespace);
    }
    let mut sides = text.split('/');
    let first = sides.next().unwrap_or_default();
    match (sides.next(), sides.next()) {
        (None, _) => match parse_side(first)? {
            Some(seg) => Ok(SoundToken {
                surface: Some(seg.clone()),
                underlying: Some(seg),
            }),
            None => Err(TokenErrorKind::ReservedSymbol),
        },
        (Some(second), None) => {
            let surface = parse_side(first)?;
            let underlying = parse_side(second)?;
            if surface.is_none() && underlying.is_none() {
                return Err(TokenErrorKind::DoubleGap);
            }
            Ok(SoundToken {
                surface,
                underlying,
            })
        }
        (Some(_), Some(_)) => Err(TokenErrorKind::TooManySlashes),
    }
}

/// A morph: an ordered, non-empty run of tokens between boundary markers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Morph {
    tokens: Vec<SoundToken>,
}

impl Morph {
    /// Returns `None` if the token list is empty or both projections are empty.
    pub fn new(tokens: Vec<SoundToken>) -> Option<Self> {
        let morph = Morph { tokens };
        if morph.tokens.is_empty()
            || (morph.surface_form().is_empty() && morph.underlying_form().is_empty())
        {
            return None;
        }
        Some(morph)
    }

    pub fn tokens(&self) -> &[SoundToken] {
        &self.tokens
    }

    /// Gap-stripped surface segments.
    pub fn surface_form(&self) -> Vec<&str> {
        self.tokens.iter().filter_map(SoundToken::surface).collect()
    }

    /// Gap-stripped underlying segments.
    pub fn underlying_form(&self) -> Vec<&str> {
        self.tokens.iter().filter_map(SoundToken::underlying).collect()
    }

    pub fn projection(&self, level: Level) -> Vec<&str> {
        match level {
            Level::Surface => self.surface_form(),
            Level::Underlying => self.underlying_form(),
        }
    }

    /// Renames every segment through `f`, keeping gaps where they are.
    pub fn map_segments(&self, mut f: impl FnMut(&str) -> String) -> Morph {
        let tokens = self
            .tokens
            .iter()
            .map(|t| SoundToken {
                surface: t.surface.as_deref().map(&mut f),
                underlying: t.underlying.as_deref().map(&mut f),
            })
            .collect();
        Morph { tokens }
    }
}

impl fmt::Display for Morph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Representation level a model is trained and evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Surface,
    Underlying,
}

impl Level {
    pub const ALL: [Level; 2] = [Level::Surface, Level::Underlying];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Surface => "surface",
            Level::Underlying => "underlying",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "surface" | "s" => Ok(Level::Surface),
            "underlying" | "u" => Ok(Level::Underlying),
            other => Err(format!("unknown level {other:?} (expected surface or underlying)")),
        }
    }
}

/// Parses a SEGMENTS field such as `v ɛ̃ t/- + e + œ̃` into morphs.
pub fn parse_segments(text: &str) -> Result<Vec<Morph>, SegmentError> {
    let err = |column: usize, kind| SegmentError {
        column,
        text: text.to_string(),
        kind,
    };
    let mut morphs = Vec::new();
    let mut current = Vec::new();
    let mut morph_start = 1;
    let mut column = 1;
    for (i, piece) in text.split(' ').enumerate() {
        if i > 0 {
            column += 1;
        }
        let piece_column = column;
        column += piece.chars().count();
        if piece.is_empty() {
            return Err(err(piece_column, TokenErrorKind::Spacing));
        }
        if piece == BOUNDARY {
            let morph = Morph::new(std::mem::take(&mut current))
                .ok_or_else(|| err(morph_start, TokenErrorKind::EmptyMorph))?;
            morphs.push(morph);
            morph_start = column + 1;
            continue;
        }
        let token = parse_token(piece).map_err(|kind| err(piece_column, kind))?;
        current.push(token);
    }
    let morph = Morph::new(current).ok_or_else(|| err(morph_start, TokenErrorKind::EmptyMorph))?;
    morphs.push(morph);
    Ok(morphs)
}

pub fn serialize_segments(morphs: &[Morph]) -> String {
    morphs
        .iter()
        .map(Morph::to_string)
        .collect::<Vec<_>>()
        .join(" + ")
}
