//! Coarse part-of-speech categories and the tag-regex map that assigns them.

use std::fmt;
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Coarse part-of-speech bucket a corpus tag maps into.
///
/// `N`/`J`/`V` drive relation applicability and explanation schemas; `A`
/// (adverb) only ever appears as a collocate; everything else is `Other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CoarsePos {
    N,
    J,
    V,
    A,
    #[serde(rename = "other")]
    Other,
}

impl CoarsePos {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoarsePos::N => "N",
            CoarsePos::J => "J",
            CoarsePos::V => "V",
            CoarsePos::A => "A",
            CoarsePos::Other => "other",
        }
    }

    pub(crate) fn code(&self) -> u8 {
        match self {
            CoarsePos::N => 0,
            CoarsePos::J => 1,
            CoarsePos::V => 2,
            CoarsePos::A => 3,
            CoarsePos::Other => 4,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<CoarsePos> {
        match code {
            0 => Some(CoarsePos::N),
            1 => Some(CoarsePos::J),
            2 => Some(CoarsePos::V),
            3 => Some(CoarsePos::A),
            4 => Some(CoarsePos::Other),
            _ => None,
        }
    }
}

impl fmt::Display for CoarsePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoarsePos {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N" => Ok(CoarsePos::N),
            "J" => Ok(CoarsePos::J),
            "V" => Ok(CoarsePos::V),
            "A" => Ok(CoarsePos::A),
            "other" | "Other" | "OTHER" => Ok(CoarsePos::Other),
            _ => Err(ConfigError::BadPos(s.to_string())),
        }
    }
}

/// Ordered list of (tag regex, coarse POS) rules; first match wins.
///
/// Regexes are anchored to the whole tag, so `N` does not match `NN`.
#[derive(Debug, Clone)]
pub struct PosMap {
    entries: Vec<PosMapEntry>,
}

#[derive(Debug, Clone)]
struct PosMapEntry {
    pattern: String,
    regex: Regex,
    pos: CoarsePos,
}

impl PosMap {
    pub fn new(rules: &[(&str, CoarsePos)]) -> Result<PosMap, ConfigError> {
        let mut entries = Vec::with_capacity(rules.len());
        for (pattern, pos) in rules {
            entries.push(PosMapEntry {
                pattern: pattern.to_string(),
                regex: anchored(pattern)?,
                pos: *pos,
            });
        }
        Ok(PosMap { entries })
    }

    /// Penn-style default: `N.*`→N, `J.*`→J, `V.*`→V, `R.*`→A.
    pub fn penn_default() -> PosMap {
        PosMap::new(&[
            ("N.*", CoarsePos::N),
            ("J.*", CoarsePos::J),
            ("V.*", CoarsePos::V),
            ("R.*", CoarsePos::A),
        ])
        .expect("default patterns compile")
    }

    /// First matching rule wins; tags that match nothing are `Other`.
    pub fn coarse(&self, tag: &str) -> CoarsePos {
        for entry in &self.entries {
            if entry.regex.is_match(tag) {
                return entry.pos;
            }
        }
        CoarsePos::Other
    }

    pub fn rules(&self) -> impl Iterator<Item = (&str, CoarsePos)> {
        self.entries.iter().map(|e| (e.pattern.as_str(), e.pos))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl PartialEq for PosMap {
    fn eq(&self, other: &Self) -> bool {
        self.rules().eq(other.rules())
    }
}

fn anchored(pattern: &str) -> Result<Regex, ConfigError> {
    Regex::new(&format!("^(?:{pattern})$"))
        .map_err(|e| ConfigError::BadRegex(pattern.to_string(), e.to_string()))
}
