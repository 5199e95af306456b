//! Explanation composition: walk a schema line by line, pull each source's
//! ranked items, and merge them under the line's gloss pattern.
//!
//! The merge rules, in order of application:
//!
//! 1. **Per-source truncation.** Every relation source contributes at most
//!    `relation_top_k` entries and the thesaurus at most `thesaurus_top_k`,
//!    cut at the source's own ranking *before* any filtering — a headword
//!    occupying a top slot is excluded afterwards and its slot is not
//!    refilled.
//! 2. **Headword exclusion.** The headword lemma never appears as an item.
//! 3. **Within-line dedup.** First occurrence wins across the line's
//!    sources in contribution order.
//! 4. **No cross-line dedup.** A lemma qualifying for two lines appears in
//!    both; redundancy is preferred over scarcity.
//!
//! Lines whose item list ends up empty are dropped. A headword with no
//! sketch data in either direction yields the distinct no-data result.

use crate::error::UnknownRelation;
use crate::pos::CoarsePos;
use crate::sketch::{LemmaPos, SketchIndex};
use crate::thesaurus::ThesaurusAccess;

use super::schema::{Schema, SourceSpec};
use super::{Explanation, ExplanationLine};

/// Per-source item quotas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComposeOptions {
    /// Top-k cut for every relation source (forward or inverse).
    pub relation_top_k: usize,
    /// Top-k cut for the thesaurus source.
    pub thesaurus_top_k: usize,
}

impl Default for ComposeOptions {
    fn default() -> ComposeOptions {
        ComposeOptions {
            relation_top_k: 3,
            thesaurus_top_k: 5,
        }
    }
}

/// Compose an explanation for `head` following `schema`.
///
/// Errors only when the schema names an inverse relation the grammar never
/// defined; missing data is never an error.
pub fn compose<T: ThesaurusAccess + ?Sized>(
    head: &LemmaPos,
    index: &SketchIndex,
    thes: &T,
    schema: &Schema,
    opts: &ComposeOptions,
) -> Result<Explanation, UnknownRelation> {
    if index.sketch_of(head).is_none() && index.inverse_of(head).is_none() {
        return Ok(Explanation {
            headword: head.lemma.clone(),
            pos: head.pos,
            no_data: true,
            lines: Vec::new(),
        });
    }

    let mut lines = Vec::new();
    for schema_line in &schema.lines {
        let mut line = LineBuilder::new(&head.lemma);
        for spec in &schema_line.sources {
            match spec {
                SourceSpec::Gloss => {
                    for relation in index.relations_for_gloss(&schema_line.key) {
                        let entries = index
                            .word_sketch(head, relation, opts.relation_top_k)
                            .expect("relation name comes from the index itself");
                        line.add(relation, entries.iter().map(|e| e.item.lemma.as_str()));
                    }
                }
                SourceSpec::Thesaurus => {
                    let neighbors = thes.neighbors(head, opts.thesaurus_top_k);
                    line.add("thesaurus", neighbors.iter().map(String::as_str));
                }
                SourceSpec::Inverse(name) => {
                    let entries = index.inverse_sketch(head, name, opts.relation_top_k)?;
                    line.add(
                        &format!("inverse {name}"),
                        entries.iter().map(|e| e.item.lemma.as_str()),
                    );
                }
            }
        }
        if !line.items.is_empty() {
            lines.push(ExplanationLine {
                key: schema_line.key.clone(),
                pattern: schema_line.pattern.clone(),
                items: line.items,
                sources: line.sources,
            });
        }
    }

    Ok(Explanation {
        headword: head.lemma.clone(),
        pos: head.pos,
        no_data: false,
        lines,
    })
}

/// Compose a noun explanation with the embedded schema and default quotas.
pub fn compose_noun<T: ThesaurusAccess + ?Sized>(
    head: &LemmaPos,
    index: &SketchIndex,
    thes: &T,
) -> Result<Explanation, UnknownRelation> {
    debug_assert_eq!(head.pos, CoarsePos::N);
    compose(
        head,
        index,
        thes,
        Schema::noun(),
        &ComposeOptions::default(),
    )
}

/// Compose an adjective explanation with the embedded schema and defaults.
pub fn compose_adjective<T: ThesaurusAccess + ?Sized>(
    head: &LemmaPos,
    index: &SketchIndex,
    thes: &T,
) -> Result<Explanation, UnknownRelation> {
    debug_assert_eq!(head.pos, CoarsePos::J);
    compose(
        head,
        index,
        thes,
        Schema::adjective(),
        &ComposeOptions::default(),
    )
}

/// Compose a verb explanation with the embedded schema and defaults.
pub fn compose_verb<T: ThesaurusAccess + ?Sized>(
    head: &LemmaPos,
    index: &SketchIndex,
    thes: &T,
) -> Result<Explanation, UnknownRelation> {
    debug_assert_eq!(head.pos, CoarsePos::V);
    compose(
        head,
        index,
        thes,
        Schema::verb(),
        &ComposeOptions::default(),
    )
}

struct LineBuilder<'a> {
    headword: &'a str,
    items: Vec<String>,
    sources: Vec<String>,
}

impl<'a> LineBuilder<'a> {
    fn new(headword: &'a str) -> LineBuilder<'a> {
        LineBuilder {
            headword,
            items: Vec::new(),
            sources: Vec::new(),
        }
    }

    /// Merge one source's already-truncated candidates. The source counts
    /// as contributing when anything survives headword exclusion, even if
    /// every survivor was already placed by an earlier source.
    fn add<'i>(&mut self, source: &str, candidates: impl Iterator<Item = &'i str>) {
        let mut contributed = false;
        for lemma in candidates {
            if lemma == self.headword {
                continue;
            }
            contributed = true;
            if !self.items.iter().any(|have| have == lemma) {
                self.items.push(lemma.to_string());
            }
        }
        if contributed && !self.sources.iter().any(|have| have == source) {
            self.sources.push(source.to_string());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest_vertical, Corpus};
    use crate::explain::schema::parse_schema;
    use crate::grammar::parse_grammar;
    use crate::pos::PosMap;
    use crate::sketch::build_sketches;
    use std::io::Cursor;

    /// Fixed neighbor list standing in for the thesaurus.
    struct Stub(Vec<&'static str>);

    impl ThesaurusAccess for Stub {
        fn neighbors(&self, _head: &LemmaPos, limit: usize) -> Vec<String> {
            self.0.iter().take(limit).map(|s| s.to_string()).collect()
        }
    }

    fn corpus_of(pairs: &[(&str, &str, usize)]) -> Corpus {
        // Each pair is (adjective, noun, count) rendered as its own sentence.
        let mut text = String::new();
        for (adj, noun, times) in pairs {
            for _ in 0..*times {
                text.push_str(&format!(
                    "<s>\n{adj}\t{adj}\tJJ\n{noun}\t{noun}\tNN\n</s>\n"
                ));
            }
        }
        ingest_vertical(Cursor::new(text), PosMap::penn_default()).unwrap()
    }

    const TWO_RELATIONS: &str = "\
=mod_a
*HEADPOS N
*COLLPOS J
*GLOSS can_be
2:[tag=\"J.*\" & !word=\"x.*\"] 1:[tag=\"N.*\"]

=mod_b
*HEADPOS N
*COLLPOS J
*GLOSS can_be
2:[tag=\"J.*\"] 1:[tag=\"N.*\"]
";

    #[test]
    fn absent_head_yields_the_no_data_result() {
        let corpus = corpus_of(&[("big", "dog", 2)]);
        let grammar = parse_grammar(TWO_RELATIONS).unwrap();
        let index = build_sketches(&corpus, &grammar, 2).unwrap();
        let ghost = LemmaPos::new("ghost", CoarsePos::N);
        let expl = compose_noun(&ghost, &index, &Stub(vec![])).unwrap();
        assert!(expl.no_data);
        assert!(expl.lines.is_empty());
    }

    #[test]
    fn empty_lines_are_dropped_but_data_is_not_no_data() {
        // "dog" has sketch data, but the noun schema line keys don't match
        // this grammar's gloss key, so a schema with no matching line
        // drops everything — still not a no-data result.
        let corpus = corpus_of(&[("big", "dog", 2)]);
        let grammar = parse_grammar(
            "=mod\n*HEADPOS N\n*COLLPOS J\n*GLOSS nothing_uses_this\n2:[tag=\"J.*\"] 1:[tag=\"N.*\"]\n",
        )
        .unwrap();
        let index = build_sketches(&corpus, &grammar, 2).unwrap();
        let dog = LemmaPos::new("dog", CoarsePos::N);
        let expl = compose_noun(&dog, &index, &Stub(vec![])).unwrap();
        assert!(!expl.no_data);
        assert!(expl.lines.is_empty());
    }

    #[test]
    fn sources_merge_in_contribution_order_with_dedup() {
        // mod_a ranks {p,q,r} (x* is excluded by its query); mod_b sees
        // everything and ranks {xx, p, q} — so the merged line is
        // p,q,r (mod_a's top-3) then xx (mod_b's only novel item).
        let corpus = corpus_of(&[
            ("p", "dog", 9),
            ("q", "dog", 8),
            ("r", "dog", 7),
            ("xx", "dog", 10),
        ]);
        let grammar = parse_grammar(TWO_RELATIONS).unwrap();
        let index = build_sketches(&corpus, &grammar, 2).unwrap();
        let dog = LemmaPos::new("dog", CoarsePos::N);
        let expl = compose_noun(&dog, &index, &Stub(vec![])).unwrap();
        let can_be = expl.lines.iter().find(|l| l.key == "can_be").unwrap();
        assert_eq!(can_be.items, ["p", "q", "r", "xx"]);
        assert_eq!(can_be.sources, ["mod_a", "mod_b"]);
    }

    #[test]
    fn fully_deduplicated_source_still_contributes() {
        // mod_b's top-3 is a subset of mod_a's items, yet it is listed.
        let corpus = corpus_of(&[("p", "dog", 9), ("q", "dog", 8), ("r", "dog", 7)]);
        let grammar = parse_grammar(TWO_RELATIONS).unwrap();
        let index = build_sketches(&corpus, &grammar, 2).unwrap();
        let dog = LemmaPos::new("dog", CoarsePos::N);
        let expl = compose_noun(&dog, &index, &Stub(vec![])).unwrap();
        let can_be = expl.lines.iter().find(|l| l.key == "can_be").unwrap();
        assert_eq!(can_be.items, ["p", "q", "r"]);
        assert_eq!(can_be.sources, ["mod_a", "mod_b"]);
    }

    #[test]
    fn headword_is_excluded_and_its_slot_is_not_refilled() {
        // The noun "dog" also occurs as adjective-position lemma "dog",
        // seeded to win the top-3; exclusion leaves only two items.
        let corpus = corpus_of(&[
            ("dog", "dog", 9),
            ("p", "dog", 8),
            ("q", "dog", 7),
            ("r", "dog", 2),
        ]);
        let grammar = parse_grammar(
            "=mod\n*HEADPOS N\n*COLLPOS J\n*GLOSS can_be\n2:[tag=\"J.*\"] 1:[tag=\"N.*\"]\n",
        )
        .unwrap();
        let index = build_sketches(&corpus, &grammar, 2).unwrap();
        let dog = LemmaPos::new("dog", CoarsePos::N);
        let expl = compose_noun(&dog, &index, &Stub(vec![])).unwrap();
        let can_be = expl.lines.iter().find(|l| l.key == "can_be").unwrap();
        assert_eq!(can_be.items, ["p", "q"]);
    }

    #[test]
    fn thesaurus_follows_gloss_sources_on_line_one() {
        let corpus = corpus_of(&[("p", "dog", 3)]);
        let grammar = parse_grammar(
            "=coord\n*HEADPOS N\n*COLLPOS N\n*GLOSS similar_meaning\n2:[tag=\"J.*\"] 1:[tag=\"N.*\"]\n",
        )
        .unwrap();
        let index = build_sketches(&corpus, &grammar, 2).unwrap();
        let dog = LemmaPos::new("dog", CoarsePos::N);
        let expl = compose_noun(&dog, &index, &Stub(vec!["n1", "n2", "p"])).unwrap();
        let first = &expl.lines[0];
        assert_eq!(first.key, "similar_meaning");
        // Gloss items first, then the thesaurus's novel ones ("p" dedups).
        assert_eq!(first.items, ["p", "n1", "n2"]);
        assert_eq!(first.sources, ["coord", "thesaurus"]);
    }

    #[test]
    fn line_order_follows_the_schema_not_the_data() {
        let corpus = corpus_of(&[("p", "dog", 3)]);
        let grammar = parse_grammar(
            "=mod\n*HEADPOS N\n*COLLPOS J\n*GLOSS can_be\n2:[tag=\"J.*\"] 1:[tag=\"N.*\"]\n",
        )
        .unwrap();
        let index = build_sketches(&corpus, &grammar, 2).unwrap();
        let dog = LemmaPos::new("dog", CoarsePos::N);
        let expl = compose_noun(&dog, &index, &Stub(vec!["n1"])).unwrap();
        let keys: Vec<&str> = expl.lines.iter().map(|l| l.key.as_str()).collect();
        assert_eq!(keys, ["similar_meaning", "can_be"]);
    }

    #[test]
    fn cross_line_redundancy_is_preserved() {
        // The same lemma feeds two different lines through two relations.
        let corpus = corpus_of(&[("p", "dog", 3)]);
        let grammar = parse_grammar(
            "=mod1\n*HEADPOS N\n*COLLPOS J\n*GLOSS can_be\n2:[tag=\"J.*\"] 1:[tag=\"N.*\"]\n\
             =mod2\n*HEADPOS N\n*COLLPOS J\n*GLOSS of_noun\n2:[tag=\"J.*\"] 1:[tag=\"N.*\"]\n",
        )
        .unwrap();
        let index = build_sketches(&corpus, &grammar, 2).unwrap();
        let dog = LemmaPos::new("dog", CoarsePos::N);
        let expl = compose_noun(&dog, &index, &Stub(vec![])).unwrap();
        let with_p: Vec<&str> = expl
            .lines
            .iter()
            .filter(|l| l.items.iter().any(|i| i == "p"))
            .map(|l| l.key.as_str())
            .collect();
        assert_eq!(with_p, ["can_be", "of_noun"]);
    }

    #[test]
    fn verb_schema_reads_valency_backwards() {
        // subject_verb: N(label 1) then V(label 2); for the verb "bark",
        // inverse lookup answers "what can bark".
        let mut text = String::new();
        for _ in 0..3 {
            text.push_str("<s>\ndog\tdog\tNN\nbarks\tbark\tVBZ\n</s>\n");
        }
        let corpus = ingest_vertical(Cursor::new(text), PosMap::penn_default()).unwrap();
        let grammar = parse_grammar(
            "=subject_verb\n*HEADPOS N\n*COLLPOS V\n*GLOSS can_do\n1:[tag=\"N.*\"] 2:[tag=\"V.*\"]\n\
             =object_verb\n*HEADPOS N\n*COLLPOS V\n*GLOSS done_to\n2:[tag=\"V.*\"] 1:[tag=\"N.*\"]\n\
             =adv_modifier\n*HEADPOS V\n*COLLPOS A\n*GLOSS how\n1:[tag=\"V.*\"] 2:[tag=\"R.*\"]\n\
             =verb_prep\n*HEADPOS V\n*COLLPOS other\n*GLOSS with_prep\n1:[tag=\"V.*\"] 2:[tag=\"IN\"]\n",
        )
        .unwrap();
        let index = build_sketches(&corpus, &grammar, 2).unwrap();
        let bark = LemmaPos::new("bark", CoarsePos::V);
        let expl = compose_verb(&bark, &index, &Stub(vec![])).unwrap();
        assert!(!expl.no_data);
        let subject = expl
            .lines
            .iter()
            .find(|l| l.key == "typical_subject")
            .unwrap();
        assert_eq!(subject.items, ["dog"]);
        assert_eq!(subject.sources, ["inverse subject_verb"]);
    }

    #[test]
    fn unknown_inverse_relation_is_an_error() {
        let corpus = corpus_of(&[("p", "dog", 3)]);
        let grammar = parse_grammar(
            "=mod\n*HEADPOS N\n*COLLPOS J\n*GLOSS can_be\n2:[tag=\"J.*\"] 1:[tag=\"N.*\"]\n",
        )
        .unwrap();
        let index = build_sketches(&corpus, &grammar, 2).unwrap();
        let schema =
            parse_schema("=broken\n*PATTERN %(items)\n*SOURCE inverse no_such_relation\n").unwrap();
        let dog = LemmaPos::new("dog", CoarsePos::N);
        let err = compose(
            &dog,
            &index,
            &Stub(vec![]),
            &schema,
            &ComposeOptions::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn quotas_are_configurable() {
        let corpus = corpus_of(&[
            ("p", "dog", 9),
            ("q", "dog", 8),
            ("r", "dog", 7),
            ("s", "dog", 6),
        ]);
        let grammar = parse_grammar(
            "=mod\n*HEADPOS N\n*COLLPOS J\n*GLOSS can_be\n2:[tag=\"J.*\"] 1:[tag=\"N.*\"]\n",
        )
        .unwrap();
        let index = build_sketches(&corpus, &grammar, 2).unwrap();
        let dog = LemmaPos::new("dog", CoarsePos::N);
        let opts = ComposeOptions {
            relation_top_k: 2,
            thesaurus_top_k: 1,
        };
        let expl = compose(&dog, &index, &Stub(vec!["n1", "n2"]), Schema::noun(), &opts).unwrap();
        let can_be = expl.lines.iter().find(|l| l.key == "can_be").unwrap();
        assert_eq!(can_be.items, ["p", "q"]);
        let first = &expl.lines[0];
        assert_eq!(first.items, ["n1"]);
    }
}
