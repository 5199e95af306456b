//! Shared error types. Each pipeline stage owns its own enum so callers can
//! match without dragging in unrelated variants.

use thiserror::Error;

/// Failures while reading vertical-format input or a saved index.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: expected 3 tab-separated fields (word, lemma, tag), got {got}")]
    BadFieldCount { line: usize, got: usize },

    #[error("line {line}: empty {field} field")]
    EmptyField { line: usize, field: &'static str },

    #[error("index file is not in the expected format: {0}")]
    BadIndex(String),

    #[error("index file version {0} is not supported (expected 1)")]
    BadVersion(u8),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Query parse errors carry the byte offset where parsing stopped.
#[derive(Debug, Error)]
pub enum QueryError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("label {label} used more than once")]
    DuplicateLabel { label: u32 },

    #[error("label {label} appears under a quantifier")]
    LabelUnderQuantifier { label: u32 },

    #[error("unknown attribute {name:?} (expected word, lemma or tag)")]
    UnknownAttribute { name: String },

    #[error("bad value pattern {pattern:?}: {message}")]
    BadPattern { pattern: String, message: String },
}

/// Sketch grammar file errors, reported with the source line.
#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("relation {name:?} is defined twice")]
    DuplicateRelation { name: String },

    #[error("relation {name:?} has no queries")]
    EmptyRelation { name: String },

    #[error("relation {relation:?}, query {query}: label {label} is missing")]
    MissingLabel {
        relation: String,
        query: usize,
        label: u32,
    },

    #[error("relation {relation:?}: {source}")]
    Query {
        relation: String,
        #[source]
        source: QueryError,
    },
}

/// Counting-consistency failure: a pair frequency exceeded a marginal.
/// The pair names are filled in when the failure surfaces during a sketch
/// build; a bare score computation leaves them empty.
#[derive(Debug)]
pub struct SketchError {
    pub head: Option<String>,
    pub collocate: Option<String>,
    pub pair_freq: u64,
    pub head_freq: u64,
    pub coll_freq: u64,
}

impl std::fmt::Display for SketchError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "counting inconsistency")?;
        if let (Some(head), Some(coll)) = (&self.head, &self.collocate) {
            write!(f, " for ({head:?}, {coll:?})")?;
        }
        write!(
            f,
            ": pair frequency {} exceeds a marginal (head {}, collocate {})",
            self.pair_freq, self.head_freq, self.coll_freq
        )
    }
}

impl std::error::Error for SketchError {}

/// Lookup of a relation name the grammar never defined.
#[derive(Debug, Error)]
#[error("unknown relation {0:?}")]
pub struct UnknownRelation(pub String);

/// Errors reading a structured explanation document.
#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("unsupported document version {0}")]
    Version(u32),

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
}

/// Explanation schema / template file errors.
#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema line {key:?} is defined twice")]
    DuplicateKey { key: String },

    #[error("schema line {key:?} has no pattern")]
    MissingPattern { key: String },

    #[error("schema line {key:?} has no sources")]
    MissingSources { key: String },
}

/// Configuration file errors.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    BadLine { line: usize, text: String },

    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: bad value for {key}: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },

    #[error("unknown part of speech {0:?} (expected N, J, V, A or other)")]
    BadPos(String),

    #[error("bad tag pattern {0:?}: {1}")]
    BadRegex(String, String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Evaluation errors.
#[derive(Debug, Error)]
pub enum EvaluateError {
    #[error("explanation item {item:?} does not occur in the corpus")]
    UnknownLemma { item: String },

    #[error("duplicate annotation for {headword:?} ({pos})")]
    DuplicateAnnotation { headword: String, pos: String },

    #[error("cannot measure coverage over an empty batch")]
    EmptyBatch,

    #[error("indicator {indicator:?} does not apply to part of speech {pos}")]
    Inapplicable { indicator: String, pos: String },
}

/// Annotation table errors (evaluation input).
#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("line {line}: expected at least {want} tab-separated fields, got {got}")]
    BadFieldCount {
        line: usize,
        want: usize,
        got: usize,
    },

    #[error("line {line}: bad {field} value {value:?}")]
    BadValue {
        line: usize,
        field: &'static str,
        value: String,
    },

    #[error("missing or incomplete header row: expected a {0:?} column")]
    MissingHeader(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
