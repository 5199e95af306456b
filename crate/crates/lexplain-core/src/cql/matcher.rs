//! Query evaluation over a corpus.
//!
//! A query is first compiled against the corpus: every atom's regex is
//! turned into a set of matching value ids — a single id lookup when the
//! pattern is a literal, otherwise one compiled-regex scan over the
//! attribute lexicon. Token tests then reduce to integer comparisons, so
//! the regex engine never runs per token.
//!
//! Matching walks each sentence start to end. At every start position the
//! element sequence is matched with greedy quantifiers and backtracking,
//! and only the first (greediest) expansion that completes is reported, so
//! each start yields at most one match. Matches never cross a sentence
//! boundary. A query whose elements all admit zero repetitions can yield a
//! zero-width match (span `[s, s)`) at a start where nothing else fits.

use super::ast::{Expr, Query};
use crate::corpus::{Attr, Corpus};

/// One query match: a token span plus label→position bindings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Match {
    pub start: u32,
    /// Exclusive end position.
    pub end: u32,
    /// `(label, position)` pairs sorted by label.
    pub bindings: Vec<(u32, u32)>,
}

impl Match {
    /// Position bound by `label`, if the query labeled one.
    pub fn binding(&self, label: u32) -> Option<u32> {
        self.bindings
            .iter()
            .find(|&&(l, _)| l == label)
            .map(|&(_, p)| p)
    }
}

/// All matches of `query` in corpus order (by sentence, then by start).
pub fn find_matches(query: &Query, corpus: &Corpus) -> Vec<Match> {
    let compiled = CompiledQuery::new(query, corpus);
    let mut out = Vec::new();
    for &(start, end) in corpus.sentences() {
        compiled.matches_in_range(start, end, &mut out);
    }
    out
}

/// A query specialized to one corpus's lexicons.
pub struct CompiledQuery<'c> {
    corpus: &'c Corpus,
    elements: Vec<CompiledElement>,
}

struct CompiledElement {
    label: Option<u32>,
    min: u32,
    max: u32,
    test: Test,
}

enum Test {
    /// The empty pattern `[]`.
    Any,
    Atom {
        attr: Attr,
        ids: IdSet,
    },
    Not(Box<Test>),
    And(Box<Test>, Box<Test>),
    Or(Box<Test>, Box<Test>),
}

enum IdSet {
    /// Literal pattern: at most one lexicon id can match (`None` when the
    /// value does not occur in the corpus).
    Literal(Option<u32>),
    /// General pattern: per-value-id match flags from one lexicon scan.
    Bitmap(Vec<bool>),
}

impl<'c> CompiledQuery<'c> {
    pub fn new(query: &Query, corpus: &'c Corpus) -> CompiledQuery<'c> {
        let elements = query
            .elements
            .iter()
            .map(|el| {
                let (min, max) = el.quant.bounds();
                CompiledElement {
                    label: el.label,
                    min,
                    max,
                    test: match &el.test {
                        None => Test::Any,
                        Some(expr) => compile_expr(expr, corpus),
                    },
                }
            })
            .collect();
        CompiledQuery { corpus, elements }
    }

    /// Append every match starting in `[start, end)` to `out`, in start
    /// order. `end` also bounds how far a match may extend.
    pub fn matches_in_range(&self, start: u32, end: u32, out: &mut Vec<Match>) {
        for s in start..end {
            let mut bindings = Vec::new();
            if let Some(span_end) = self.match_elements(0, s, end, &mut bindings) {
                bindings.sort_unstable();
                out.push(Match {
                    start: s,
                    end: span_end,
                    bindings,
                });
            }
        }
    }

    /// Match elements `idx..` starting at `pos`; greedy, backtracking.
    /// Returns the span end of the first successful completion.
    fn match_elements(
        &self,
        idx: usize,
        pos: u32,
        sent_end: u32,
        bindings: &mut Vec<(u32, u32)>,
    ) -> Option<u32> {
        let Some(el) = self.elements.get(idx) else {
            return Some(pos);
        };
        // How many consecutive tokens from `pos` satisfy the test.
        let mut available = 0u32;
        while available < el.max
            && pos + available < sent_end
            && el.test.accepts(self.corpus, pos + available)
        {
            available += 1;
        }
        let mut take = available;
        while take + 1 > el.min {
            let checkpoint = bindings.len();
            if let Some(label) = el.label {
                // Labels are restricted to unquantified elements, so the
                // bound position is always `pos` itself.
                bindings.push((label, pos));
            }
            if let Some(end) = self.match_elements(idx + 1, pos + take, sent_end, bindings) {
                return Some(end);
            }
            bindings.truncate(checkpoint);
            if take == 0 {
                break;
            }
            take -= 1;
        }
        None
    }
}

impl Test {
    fn accepts(&self, corpus: &Corpus, pos: u32) -> bool {
        match self {
            Test::Any => true,
            Test::Atom { attr, ids } => {
                let id = corpus.token_id(*attr, pos);
                match ids {
                    IdSet::Literal(want) => *want == Some(id),
                    IdSet::Bitmap(flags) => flags[id as usize],
                }
            }
            Test::Not(inner) => !inner.accepts(corpus, pos),
            Test::And(a, b) => a.accepts(corpus, pos) && b.accepts(corpus, pos),
            Test::Or(a, b) => a.accepts(corpus, pos) || b.accepts(corpus, pos),
        }
    }
}

fn compile_expr(expr: &Expr, corpus: &Corpus) -> Test {
    match expr {
        Expr::Atom(atom) => {
            let ids = if is_literal(&atom.pattern) {
                IdSet::Literal(corpus.value_id(atom.attr, &atom.pattern))
            } else {
                let re = regex::Regex::new(&format!("^(?:{})$", atom.pattern))
                    .expect("pattern was validated at parse time");
                let mut flags = vec![false; corpus.value_count(atom.attr)];
                for (id, value) in corpus.values(atom.attr) {
                    flags[id as usize] = re.is_match(value);
                }
                IdSet::Bitmap(flags)
            };
            Test::Atom {
                attr: atom.attr,
                ids,
            }
        }
        Expr::Not(inner) => Test::Not(Box::new(compile_expr(inner, corpus))),
        Expr::And(a, b) => Test::And(
            Box::new(compile_expr(a, corpus)),
            Box::new(compile_expr(b, corpus)),
        ),
        Expr::Or(a, b) => Test::Or(
            Box::new(compile_expr(a, corpus)),
            Box::new(compile_expr(b, corpus)),
        ),
    }
}

/// A pattern with no regex metacharacters matches exactly one lexicon value.
fn is_literal(pattern: &str) -> bool {
    !pattern.chars().any(|c| {
        matches!(
            c,
            '.' | '^' | '$' | '*' | '+' | '?' | '(' | ')' | '[' | ']' | '{' | '}' | '|' | '\\'
        )
    })
}
