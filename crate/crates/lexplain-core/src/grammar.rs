//! Sketch grammar files: named relations grouping one or more labeled
//! queries, with the coarse POS they apply to and the explanation line
//! (gloss) they feed.
//!
//! File format, line oriented:
//!
//! ```text
//! # full-line comment
//! =relation_name
//! *HEADPOS N         # coarse POS required of the headword (label 1)
//! *COLLPOS J         # coarse POS expected of the collocate (label 2)
//! *GLOSS can_be      # explanation-line key this relation feeds
//! 2:[tag="J.*"] 1:[tag="N.*"]
//! ```
//!
//! Every non-directive, non-comment line inside a relation block is one
//! query; a relation may list several (their matches are pooled). Each
//! query must bind both label 1 (headword) and label 2 (collocate).
//! Comments are full-line only — `#` inside a quoted regex is pattern text.

use std::fmt;

use crate::corpus::{Attr, Corpus};
use crate::cql::{parse_query, Expr, Query};
use crate::error::GrammarError;
use crate::pos::CoarsePos;

/// One named, directed grammatical relation.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub name: String,
    /// Coarse POS the headword must have; mismatching matches are skipped.
    pub head_pos: CoarsePos,
    /// Coarse POS the collocate is expected to have (declarative; the
    /// observed POS is recorded at count time).
    pub collocate_pos: CoarsePos,
    /// Key of the explanation line this relation contributes to.
    pub gloss_key: String,
    pub queries: Vec<Query>,
}

/// An ordered set of relations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grammar {
    pub relations: Vec<Relation>,
}

impl Grammar {
    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }
}

pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut relations: Vec<Relation> = Vec::new();
    let mut current: Option<PartialRelation> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('=') {
            if let Some(rel) = current.take() {
                relations.push(rel.finish()?);
            }
            let name = name.trim();
            if name.is_empty() {
                return Err(GrammarError::Parse {
                    line: line_no,
                    message: "relation name is empty".into(),
                });
            }
            if relations.iter().any(|r| r.name == name) {
                return Err(GrammarError::DuplicateRelation {
                    name: name.to_string(),
                });
            }
            current = Some(PartialRelation::new(name.to_string(), line_no));
            continue;
        }
        let Some(rel) = current.as_mut() else {
            return Err(GrammarError::Parse {
                line: line_no,
                message: "content before the first `=relation` header".into(),
            });
        };
        if let Some(directive) = line.strip_prefix('*') {
            rel.directive(directive, line_no)?;
        } else {
            rel.query(line, line_no)?;
        }
    }
    if let Some(rel) = current.take() {
        relations.push(rel.finish()?);
    }
    Ok(Grammar { relations })
}

struct PartialRelation {
    name: String,
    header_line: usize,
    head_pos: Option<CoarsePos>,
    collocate_pos: Option<CoarsePos>,
    gloss_key: Option<String>,
    queries: Vec<Query>,
}

impl PartialRelation {
    fn new(name: String, header_line: usize) -> PartialRelation {
        PartialRelation {
            name,
            header_line,
            head_pos: None,
            collocate_pos: None,
            gloss_key: None,
            queries: Vec::new(),
        }
    }

    fn directive(&mut self, text: &str, line_no: usize) -> Result<(), GrammarError> {
        let (key, value) = match text.split_once(char::is_whitespace) {
            Some((k, v)) => (k, v.trim()),
            None => (text, ""),
        };
        let parse_pos = |value: &str| -> Result<CoarsePos, GrammarError> {
            value.parse().map_err(|_| GrammarError::Parse {
                line: line_no,
                message: format!("bad coarse POS {value:?} (expected N, J, V, A or other)"),
            })
        };
        let slot = |name: &str, filled: bool| -> Result<(), GrammarError> {
            if filled {
                Err(GrammarError::Parse {
                    line: line_no,
                    message: format!("duplicate *{name} directive"),
                })
            } else {
                Ok(())
            }
        };
        match key {
            "HEADPOS" => {
                slot("HEADPOS", self.head_pos.is_some())?;
                self.head_pos = Some(parse_pos(value)?);
            }
            "COLLPOS" => {
                slot("COLLPOS", self.collocate_pos.is_some())?;
                self.collocate_pos = Some(parse_pos(value)?);
            }
            "GLOSS" => {
                slot("GLOSS", self.gloss_key.is_some())?;
                if value.is_empty() {
                    return Err(GrammarError::Parse {
                        line: line_no,
                        message: "empty *GLOSS key".into(),
                    });
                }
                self.gloss_key = Some(value.to_string());
            }
            other => {
                return Err(GrammarError::Parse {
                    line: line_no,
                    message: format!("unknown directive *{other}"),
                })
            }
        }
        Ok(())
    }

    fn query(&mut self, text: &str, _line_no: usize) -> Result<(), GrammarError> {
        let query = parse_query(text).map_err(|source| GrammarError::Query {
            relation: self.name.clone(),
            source,
        })?;
        let index = self.queries.len() + 1;
        for label in [1u32, 2] {
            let bound = query.elements.iter().any(|el| el.label == Some(label));
            if !bound {
                return Err(GrammarError::MissingLabel {
                    relation: self.name.clone(),
                    query: index,
                    label,
                });
            }
        }
        self.queries.push(query);
        Ok(())
    }

    fn finish(self) -> Result<Relation, GrammarError> {
        if self.queries.is_empty() {
            return Err(GrammarError::EmptyRelation { name: self.name });
        }
        let require = |opt: Option<CoarsePos>, what: &str| {
            opt.ok_or_else(|| GrammarError::Parse {
                line: self.header_line,
                message: format!("relation {:?} is missing *{what}", self.name),
            })
        };
        let head_pos = require(self.head_pos, "HEADPOS")?;
        let collocate_pos = require(self.collocate_pos, "COLLPOS")?;
        let gloss_key = self.gloss_key.ok_or_else(|| GrammarError::Parse {
            line: self.header_line,
            message: format!("relation {:?} is missing *GLOSS", self.name),
        })?;
        Ok(Relation {
            name: self.name,
            head_pos,
            collocate_pos,
            gloss_key,
            queries: self.queries,
        })
    }
}

/// Warn about relations whose tag patterns can never match: each distinct
/// tag regex is checked against the corpus tagset.
pub fn validate_against(grammar: &Grammar, corpus: &Corpus) -> Vec<String> {
    let tags: Vec<&str> = corpus.values(Attr::Tag).map(|(_, v)| v).collect();
    let mut warnings = Vec::new();
    for relation in &grammar.relations {
        let mut patterns: Vec<&str> = Vec::new();
        for query in &relation.queries {
            for element in &query.elements {
                if let Some(expr) = &element.test {
                    collect_tag_patterns(expr, &mut patterns);
                }
            }
        }
        patterns.sort_unstable();
        patterns.dedup();
        for pattern in patterns {
            let matches_some = match regex::Regex::new(&format!("^(?:{pattern})$")) {
                Ok(re) => tags.iter().any(|t| re.is_match(t)),
                Err(_) => false,
            };
            if !matches_some {
                warnings.push(format!(
                    "relation {:?}: tag pattern {pattern:?} matches no tag in the corpus",
                    relation.name
                ));
            }
        }
    }
    warnings
}

fn collect_tag_patterns<'q>(expr: &'q Expr, out: &mut Vec<&'q str>) {
    match expr {
        Expr::Atom(atom) => {
            if atom.attr == Attr::Tag {
                out.push(&atom.pattern);
            }
        }
        Expr::Not(inner) => collect_tag_patterns(inner, out),
        Expr::And(a, b) | Expr::Or(a, b) => {
            collect_tag_patterns(a, out);
            collect_tag_patterns(b, out);
        }
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, rel) in self.relations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            writeln!(f, "={}", rel.name)?;
            writeln!(f, "*HEADPOS {}", rel.head_pos)?;
            writeln!(f, "*COLLPOS {}", rel.collocate_pos)?;
            writeln!(f, "*GLOSS {}", rel.gloss_key)?;
            for query in &rel.queries {
                writeln!(f, "{query}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ingest_vertical;
    use crate::pos::PosMap;
    use std::io::Cursor;

    const MODIFIER: &str = "=modifier\n*HEADPOS N\n*COLLPOS J\n*GLOSS can_be\n\
                            2:[tag=\"J.*\"] 1:[tag=\"N.*\"]\n";

    #[test]
    fn single_relation_parses() {
        let g = parse_grammar(MODIFIER).unwrap();
        assert_eq!(g.relations.len(), 1);
        let rel = &g.relations[0];
        assert_eq!(rel.name, "modifier");
        assert_eq!(rel.head_pos, CoarsePos::N);
        assert_eq!(rel.collocate_pos, CoarsePos::J);
        assert_eq!(rel.gloss_key, "can_be");
        assert_eq!(rel.queries.len(), 1);
    }

    #[test]
    fn relations_may_share_a_gloss_key() {
        let text = format!(
            "{MODIFIER}\n=modifier2\n*HEADPOS N\n*COLLPOS J\n*GLOSS can_be\n\
             2:[tag=\"J.*\"] [] 1:[tag=\"N.*\"]\n"
        );
        let g = parse_grammar(&text).unwrap();
        assert_eq!(g.relations.len(), 2);
        assert_eq!(g.relations[0].gloss_key, g.relations[1].gloss_key);
    }

    #[test]
    fn missing_label_names_the_relation() {
        let text = "=broken\n*HEADPOS N\n*COLLPOS J\n*GLOSS x\n[tag=\"J.*\"] 1:[tag=\"N.*\"]\n";
        let err = parse_grammar(text).unwrap_err();
        let GrammarError::MissingLabel {
            relation, label, ..
        } = err
        else {
            panic!("expected MissingLabel, got {err}");
        };
        assert_eq!(relation, "broken");
        assert_eq!(label, 2);
    }

    #[test]
    fn duplicate_relation_name_is_rejected() {
        let text = format!("{MODIFIER}{MODIFIER}");
        assert!(matches!(
            parse_grammar(&text).unwrap_err(),
            GrammarError::DuplicateRelation { .. }
        ));
    }

    #[test]
    fn relation_without_queries_is_rejected() {
        let text = "=empty\n*HEADPOS N\n*COLLPOS J\n*GLOSS x\n";
        assert!(matches!(
            parse_grammar(text).unwrap_err(),
            GrammarError::EmptyRelation { .. }
        ));
    }

    #[test]
    fn missing_directive_is_rejected() {
        let text = "=nohead\n*COLLPOS J\n*GLOSS x\n2:[] 1:[]\n";
        let err = parse_grammar(text).unwrap_err().to_string();
        assert!(err.contains("HEADPOS"), "got: {err}");
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = format!("# a grammar\n\n{MODIFIER}# trailing note\n");
        assert_eq!(parse_grammar(&text).unwrap().relations.len(), 1);
    }

    #[test]
    fn content_before_first_relation_is_rejected() {
        let err = parse_grammar("2:[] 1:[]\n").unwrap_err().to_string();
        assert!(err.contains("before the first"), "got: {err}");
    }

    #[test]
    fn print_parse_round_trip() {
        let text = format!(
            "{MODIFIER}\n=subject\n*HEADPOS N\n*COLLPOS V\n*GLOSS can_do\n\
             1:[tag=\"N.*\"] [tag=\"R.*\"]{{0,2}} 2:[tag=\"V.*\" & !lemma=\"be\"]\n"
        );
        let g = parse_grammar(&text).unwrap();
        let printed = g.to_string();
        let reparsed = parse_grammar(&printed).unwrap();
        assert_eq!(g, reparsed);
    }

    #[test]
    fn unmatchable_tag_pattern_warns() {
        let corpus = ingest_vertical(
            Cursor::new("<s>\nbig\tbig\tJJ\ndog\tdog\tNN\n</s>\n"),
            PosMap::penn_default(),
        )
        .unwrap();
        let good = parse_grammar(MODIFIER).unwrap();
        assert!(validate_against(&good, &corpus).is_empty());

        let bad = parse_grammar(
            "=odd\n*HEADPOS N\n*COLLPOS J\n*GLOSS x\n2:[tag=\"ZZ.*\"] 1:[tag=\"N.*\"]\n",
        )
        .unwrap();
        let warnings = validate_against(&bad, &corpus);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("ZZ.*"));
    }

    #[test]
    fn empty_grammar_yields_no_warnings() {
        let corpus = ingest_vertical(Cursor::new(""), PosMap::penn_default()).unwrap();
        assert!(validate_against(&Grammar::default(), &corpus).is_empty());
    }
}
