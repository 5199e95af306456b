//! Manual annotation tables: per-headword quality labels plus the flags that
//! only a human can judge.

use std::io::BufRead;
use std::str::FromStr;

use crate::error::AnnotationError;
use crate::pos::CoarsePos;

/// Overall quality judgment for one explanation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quality {
    /// Usable as-is.
    Good,
    /// Contains useful material but needs human editing.
    PostEdit,
    /// Insufficient; would have to be rewritten.
    Bad,
}

impl Quality {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quality::Good => "good",
            Quality::PostEdit => "post-edit",
            Quality::Bad => "bad",
        }
    }
}

/// One row of a manual annotation table.
///
/// `troponym` is carried here rather than detected automatically because
/// recognizing manner-of relations between verbs needs human judgment; the
/// column is optional in the file and `None` when absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub headword: String,
    pub pos: CoarsePos,
    pub quality: Quality,
    pub data_issues: bool,
    pub troponym: Option<bool>,
    pub notes: String,
}

/// Parse a tab-separated annotation table.
///
/// The first line is a header naming the columns. Required columns:
/// `headword`, `pos`, `quality`, `data_issues`, `notes`; an optional
/// `troponym` column may appear anywhere. Columns are located by name, so
/// their order is free. When `notes` is the final column it may contain
/// tabs; the tail of the row is folded back together.
pub fn parse_annotations<R: BufRead>(input: R) -> Result<Vec<AnnotationRecord>, AnnotationError> {
    let mut lines = input.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(AnnotationError::MissingHeader("headword")),
    };
    let names: Vec<&str> = header.trim_end_matches('\r').split('\t').collect();
    let find = |name: &'static str| -> Result<usize, AnnotationError> {
        names
            .iter()
            .position(|n| *n == name)
            .ok_or(AnnotationError::MissingHeader(name))
    };
    let col_headword = find("headword")?;
    let col_pos = find("pos")?;
    let col_quality = find("quality")?;
    let col_data_issues = find("data_issues")?;
    let col_notes = find("notes")?;
    let col_troponym = names.iter().position(|n| *n == "troponym");
    let want = names.len();

    let mut records = Vec::new();
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 2;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < want {
            return Err(AnnotationError::BadFieldCount {
                line: line_no,
                want,
                got: fields.len(),
            });
        }
        let bad = |field: &'static str, value: &str| AnnotationError::BadValue {
            line: line_no,
            field,
            value: value.to_string(),
        };
        let pos = CoarsePos::from_str(fields[col_pos]).map_err(|_| bad("pos", fields[col_pos]))?;
        let quality = match fields[col_quality] {
            "good" => Quality::Good,
            "post-edit" => Quality::PostEdit,
            "bad" => Quality::Bad,
            other => return Err(bad("quality", other)),
        };
        let data_issues = parse_bool(fields[col_data_issues])
            .ok_or_else(|| bad("data_issues", fields[col_data_issues]))?;
        let troponym = match col_troponym {
            Some(col) => Some(parse_bool(fields[col]).ok_or_else(|| bad("troponym", fields[col]))?),
            None => None,
        };
        let notes = if col_notes == want - 1 {
            fields[col_notes..].join("\t")
        } else {
            fields[col_notes].to_string()
        };
        records.push(AnnotationRecord {
            headword: fields[col_headword].to_string(),
            pos,
            quality,
            data_issues,
            troponym,
            notes,
        });
    }
    Ok(records)
}

fn parse_bool(value: &str) -> Option<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}
