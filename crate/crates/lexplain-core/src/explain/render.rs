//! Renderers for composed explanations: plain text for human review and a
//! versioned JSON document for downstream tooling.

use serde::{Deserialize, Serialize};

use super::Explanation;
use crate::error::DocumentError;

/// Versioned on-disk wrapper. The version is bumped only when the layout of
/// the document itself changes, not when explanation content does.
#[derive(Serialize, Deserialize)]
struct Document {
    schema_version: u32,
    #[serde(flatten)]
    explanation: Explanation,
}

const DOCUMENT_VERSION: u32 = 1;

/// Render the plain-text form: a `headword:` headline followed by one
/// hyphen-bulleted line per composed line, with `%(head)` and `%(items)`
/// substituted. An explanation without lines renders the `no data`
/// sentinel instead of an empty body.
pub fn render_text(explanation: &Explanation) -> String {
    let mut out = String::new();
    out.push_str(&explanation.headword);
    out.push_str(":\n");
    if explanation.lines.is_empty() {
        out.push_str("no data\n");
        return out;
    }
    for line in &explanation.lines {
        let text = line
            .pattern
            .replace("%(head)", &explanation.headword)
            .replace("%(items)", &line.items.join(", "));
        out.push_str("- ");
        out.push_str(&text);
        out.push('\n');
    }
    out
}

/// Render the structured JSON form, wrapped with a document version.
pub fn render_structured(explanation: &Explanation) -> String {
    let document = Document {
        schema_version: DOCUMENT_VERSION,
        explanation: explanation.clone(),
    };
    let mut out = serde_json::to_string_pretty(&document).expect("explanation serializes to JSON");
    out.push('\n');
    out
}

/// Parse a structured JSON document back into an [`Explanation`].
pub fn parse_structured(input: &str) -> Result<Explanation, DocumentError> {
    let document: Document = serde_json::from_str(input)?;
    if document.schema_version != DOCUMENT_VERSION {
        return Err(DocumentError::Version(document.schema_version));
    }
    Ok(document.explanation)
}
