//! Bundled sample data.
//!
//! `table2()` is the German/French illustration of the annotation format
//! (ten rows). `mandarin()` is a synthetic minimal decimal system for 1-40
//! with segmental transcriptions: 19 distinct segments, 10 morphemes and no
//! allomorphy. `mandarin_syllabic()` is the same system with one token per
//! syllable.

use crate::wordlist::{parse_wordlist, Delimiter, Morph, SoundToken, WordForm, Wordlist};

pub const TABLE2_TSV: &str = include_str!("../data/table2_sample.tsv");

pub const MANDARIN: &str = "mand1415";

const MANDARIN_UNITS: [&str; 9] = [
    "j i ⁵⁵",
    "ɚ ⁵¹",
    "s a n ⁵⁵",
    "s ɿ ⁵¹",
    "u ²¹⁴",
    "l j ou ⁵¹",
    "tɕʰ i ⁵⁵",
    "p a ⁵⁵",
    "tɕ j ou ²¹⁴",
];
const MANDARIN_TEN: &str = "ʂ ʅ ³⁵";

const MANDARIN_SYLLABLES: [&str; 9] = ["yi", "er", "san", "si", "wu", "liu", "qi", "ba", "jiu"];

const GLOSSES: [&str; 9] = [
    "ONE", "TWO", "THREE", "FOUR", "FIVE", "SIX", "SEVEN", "EIGHT", "NINE",
];

pub fn table2() -> Wordlist {
    parse_wordlist(TABLE2_TSV.as_bytes(), Delimiter::Tab).expect("bundled sample parses")
}

pub fn mandarin() -> Wordlist {
    let units: Vec<Vec<&str>> = MANDARIN_UNITS.iter().map(|u| u.split(' ').collect()).collect();
    concatenative_system(MANDARIN, &units, &MANDARIN_TEN.split(' ').collect::<Vec<_>>(), 40)
}

pub fn mandarin_syllabic() -> Wordlist {
    let units: Vec<Vec<&str>> = MANDARIN_SYLLABLES.iter().map(|u| vec![*u]).collect();
    concatenative_system(MANDARIN, &units, &["shi"], 40)
}

/// Builds a purely concatenative base-`b` numeral list for `1..=max`, where
/// `b = units.len() + 1`. Formation: `r`, `BASE`, `BASE+r`, `q+BASE`,
/// `q+BASE+r`. Cognate IDs are `1..b` for units and `b` for the base.
///
/// Panics if some multiplier `q` of the base would exceed the unit inventory
/// (`max / b >= b`).
pub fn concatenative_system(
    language: &str,
    units: &[Vec<&str>],
    base: &[&str],
    max: i64,
) -> Wordlist {
    let b = units.len() as i64 + 1;
    assert!(max / b < b, "base {b} cannot reach {max} with single-morph multipliers");
    let base_id = b as u32;
    let morph = |segs: &[&str]| Morph::new(segs.iter().map(SoundToken::plain).collect()).unwrap();
    let unit = |n: i64| (morph(&units[n as usize - 1]), n as u32, gloss(n as usize));
    let base_part = || (morph(base), base_id, "BASE".to_string());
    let rows = (1..=max)
        .map(|n| {
            let (q, r) = (n / b, n % b);
            let parts = match (q, r) {
                (0, _) => vec![unit(r)],
                (1, 0) => vec![base_part()],
                (1, _) => vec![base_part(), unit(r)],
                (_, 0) => vec![unit(q), base_part()],
                _ => vec![unit(q), base_part(), unit(r)],
            };
            let mut morphs = Vec::new();
            let mut cognates = Vec::new();
            let mut glosses = Vec::new();
            for (m, c, g) in parts {
                morphs.push(m);
                cognates.push(c);
                glosses.push(g);
            }
            WordForm {
                id: format!("{language}-{n}"),
                language: language.to_string(),
                concept: n.to_string(),
                value: n,
                form: String::new(),
                morphs,
                cognates,
                glosses,
                extra: Vec::new(),
            }
        })
        .collect();
    Wordlist::new(rows)
}

fn gloss(n: usize) -> String {
    GLOSSES
        .get(n - 1)
        .map_or_else(|| format!("UNIT{n}"), |g| g.to_string())
}
