//! Templated explanation drafts: per-POS schemas, composition from ranked
//! sketch and thesaurus material, and the text / structured renderers.

mod compose;
mod render;
mod schema;

pub use compose::{compose, compose_adjective, compose_noun, compose_verb, ComposeOptions};
pub use render::{parse_structured, render_structured, render_text};
pub use schema::{parse_schema, Schema, SchemaLine, SourceSpec};

use serde::{Deserialize, Serialize};

use crate::pos::CoarsePos;

/// One composed line: the schema line's key and pattern plus the merged,
/// deduplicated items and the names of the sources that contributed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationLine {
    pub key: String,
    pub pattern: String,
    pub items: Vec<String>,
    pub sources: Vec<String>,
}

/// A composed explanation draft for one headword.
///
/// `no_data` marks a headword with no sketch data in either direction —
/// deliberately distinct from an explanation whose lines all came up
/// empty after filtering (that one has `no_data == false` and no lines).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub headword: String,
    pub pos: CoarsePos,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub no_data: bool,
    pub lines: Vec<ExplanationLine>,
}
