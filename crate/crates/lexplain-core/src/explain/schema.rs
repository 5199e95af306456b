//! Explanation schemas: the ordered line kinds of one part of speech,
//! each with a display pattern and the sources that fill it.
//!
//! Schema files use the same directive style as grammar files:
//!
//! ```text
//! =line_key
//! *PATTERN %(head) can be %(items)
//! *SOURCE gloss
//! *SOURCE thesaurus
//! ```
//!
//! Sources are drawn in the order listed. `gloss` expands to every grammar
//! relation whose gloss key equals the line key (in grammar order),
//! `thesaurus` to distributional neighbors, and `inverse NAME` to the
//! named relation read from the collocate side. Patterns must mention
//! `%(items)`; `%(head)` is optional. The defaults for nouns, adjectives
//! and verbs are embedded in the library and can be replaced per
//! configuration.

use std::fmt;
use std::sync::OnceLock;

use crate::error::SchemaError;
use crate::pos::CoarsePos;

/// Where one line of an explanation draws its items from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceSpec {
    /// All grammar relations sharing the line's key as gloss key.
    Gloss,
    /// Distributional-thesaurus neighbors.
    Thesaurus,
    /// The named relation read backwards (head position filled by others).
    Inverse(String),
}

impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSpec::Gloss => f.write_str("gloss"),
            SourceSpec::Thesaurus => f.write_str("thesaurus"),
            SourceSpec::Inverse(name) => write!(f, "inverse {name}"),
        }
    }
}

/// One line kind of a schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaLine {
    pub key: String,
    /// Gloss text with `%(head)` and `%(items)` placeholders.
    pub pattern: String,
    pub sources: Vec<SourceSpec>,
}

/// Ordered line kinds for one part of speech.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub lines: Vec<SchemaLine>,
}

impl Schema {
    /// The embedded noun schema (nine lines).
    pub fn noun() -> &'static Schema {
        static NOUN: OnceLock<Schema> = OnceLock::new();
        NOUN.get_or_init(|| {
            parse_schema(include_str!("../../templates/noun.tpl"))
                .expect("embedded noun schema parses")
        })
    }

    /// The embedded adjective schema.
    pub fn adjective() -> &'static Schema {
        static ADJ: OnceLock<Schema> = OnceLock::new();
        ADJ.get_or_init(|| {
            parse_schema(include_str!("../../templates/adjective.tpl"))
                .expect("embedded adjective schema parses")
        })
    }

    /// The embedded verb schema.
    pub fn verb() -> &'static Schema {
        static VERB: OnceLock<Schema> = OnceLock::new();
        VERB.get_or_init(|| {
            parse_schema(include_str!("../../templates/verb.tpl"))
                .expect("embedded verb schema parses")
        })
    }

    /// Default schema for a coarse POS; only N, J and V have one.
    pub fn for_pos(pos: CoarsePos) -> Option<&'static Schema> {
        match pos {
            CoarsePos::N => Some(Schema::noun()),
            CoarsePos::J => Some(Schema::adjective()),
            CoarsePos::V => Some(Schema::verb()),
            _ => None,
        }
    }
}

pub fn parse_schema(text: &str) -> Result<Schema, SchemaError> {
    let mut lines: Vec<SchemaLine> = Vec::new();
    let mut current: Option<PartialLine> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(key) = line.strip_prefix('=') {
            if let Some(done) = current.take() {
                lines.push(done.finish()?);
            }
            let key = key.trim();
            if key.is_empty() {
                return Err(SchemaError::Parse {
                    line: line_no,
                    message: "line key is empty".into(),
                });
            }
            if lines.iter().any(|l| l.key == key) {
                return Err(SchemaError::DuplicateKey {
                    key: key.to_string(),
                });
            }
            current = Some(PartialLine {
                key: key.to_string(),
                pattern: None,
                sources: Vec::new(),
            });
            continue;
        }
        let Some(part) = current.as_mut() else {
            return Err(SchemaError::Parse {
                line: line_no,
                message: "content before the first `=line_key` header".into(),
            });
        };
        let Some(directive) = line.strip_prefix('*') else {
            return Err(SchemaError::Parse {
                line: line_no,
                message: format!("expected a *PATTERN or *SOURCE directive, got {line:?}"),
            });
        };
        let (kind, value) = match directive.split_once(char::is_whitespace) {
            Some((k, v)) => (k, v.trim()),
            None => (directive, ""),
        };
        match kind {
            "PATTERN" => {
                if part.pattern.is_some() {
                    return Err(SchemaError::Parse {
                        line: line_no,
                        message: "duplicate *PATTERN directive".into(),
                    });
                }
                if !value.contains("%(items)") {
                    return Err(SchemaError::Parse {
                        line: line_no,
                        message: "pattern must contain %(items)".into(),
                    });
                }
                part.pattern = Some(value.to_string());
            }
            "SOURCE" => {
                let spec = match value {
                    "gloss" => SourceSpec::Gloss,
                    "thesaurus" => SourceSpec::Thesaurus,
                    other => match other.strip_prefix("inverse ") {
                        Some(name) if !name.trim().is_empty() => {
                            SourceSpec::Inverse(name.trim().to_string())
                        }
                        _ => {
                            return Err(SchemaError::Parse {
                                line: line_no,
                                message: format!(
                                    "bad source {value:?} (expected gloss, thesaurus \
                                     or inverse NAME)"
                                ),
                            })
                        }
                    },
                };
                part.sources.push(spec);
            }
            other => {
                return Err(SchemaError::Parse {
                    line: line_no,
                    message: format!("unknown directive *{other}"),
                })
            }
        }
    }
    if let Some(done) = current.take() {
        lines.push(done.finish()?);
    }
    Ok(Schema { lines })
}

struct PartialLine {
    key: String,
    pattern: Option<String>,
    sources: Vec<SourceSpec>,
}

impl PartialLine {
    fn finish(self) -> Result<SchemaLine, SchemaError> {
        let pattern = self.pattern.ok_or_else(|| SchemaError::MissingPattern {
            key: self.key.clone(),
        })?;
        if self.sources.is_empty() {
            return Err(SchemaError::MissingSources { key: self.key });
        }
        Ok(SchemaLine {
            key: self.key,
            pattern,
            sources: self.sources,
        })
    }
}
