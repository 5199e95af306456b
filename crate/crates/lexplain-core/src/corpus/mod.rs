//! Immutable token store over vertical-format input.
//!
//! A [`Corpus`] keeps three parallel columns (word, lemma, tag) as dense
//! value ids into per-attribute lexicons, plus sentence ranges and, for every
//! distinct value, the sorted list of positions where it occurs. Everything
//! downstream — query matching, collocation counting, frequency lookups —
//! reads this structure and never mutates it.

mod index;
mod vertical;

pub use vertical::ingest_vertical;

use std::collections::HashMap;

use crate::pos::{CoarsePos, PosMap};

/// The three positional attributes every token carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Attr {
    Word = 0,
    Lemma = 1,
    Tag = 2,
}

pub const ATTRS: [Attr; 3] = [Attr::Word, Attr::Lemma, Attr::Tag];

impl Attr {
    pub fn parse(name: &str) -> Option<Attr> {
        match name {
            "word" => Some(Attr::Word),
            "lemma" => Some(Attr::Lemma),
            "tag" => Some(Attr::Tag),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Attr::Word => "word",
            Attr::Lemma => "lemma",
            Attr::Tag => "tag",
        }
    }
}

/// Value↔id mapping for one attribute, with per-value sorted postings.
///
/// Ids are dense (`0..len`) in first-occurrence order, so they are stable for
/// a given input stream.
#[derive(Debug, Default)]
pub(crate) struct Lexicon {
    values: Vec<String>,
    ids: HashMap<String, u32>,
    postings: Vec<Vec<u32>>,
}

impl Lexicon {
    fn intern(&mut self, value: &str, position: u32) -> u32 {
        match self.ids.get(value) {
            Some(&id) => {
                self.postings[id as usize].push(position);
                id
            }
            None => {
                let id = self.values.len() as u32;
                self.values.push(value.to_string());
                self.ids.insert(value.to_string(), id);
                self.postings.push(vec![position]);
                id
            }
        }
    }

    fn id(&self, value: &str) -> Option<u32> {
        self.ids.get(value).copied()
    }

    fn value(&self, id: u32) -> &str {
        &self.values[id as usize]
    }

    fn len(&self) -> usize {
        self.values.len()
    }
}

/// Position-indexed token store with sentence ranges and postings.
#[derive(Debug)]
pub struct Corpus {
    /// Per-attribute columns of value ids, all `token_count` long.
    cols: [Vec<u32>; 3],
    /// Sorted, disjoint `[start, end)` ranges covering every position.
    sentences: Vec<(u32, u32)>,
    lexicons: [Lexicon; 3],
    pos_map: PosMap,
    /// Coarse POS per tag value id, precomputed at build time.
    tag_coarse: Vec<CoarsePos>,
}

impl Corpus {
    pub(crate) fn from_parts(
        cols: [Vec<u32>; 3],
        sentences: Vec<(u32, u32)>,
        lexicons: [Lexicon; 3],
        pos_map: PosMap,
    ) -> Corpus {
        let tag_coarse = lexicons[Attr::Tag as usize]
            .values
            .iter()
            .map(|tag| pos_map.coarse(tag))
            .collect();
        Corpus {
            cols,
            sentences,
            lexicons,
            pos_map,
            tag_coarse,
        }
    }

    pub fn token_count(&self) -> usize {
        self.cols[0].len()
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    /// Sentence ranges as `[start, end)` position pairs, in order.
    pub fn sentences(&self) -> &[(u32, u32)] {
        &self.sentences
    }

    /// Number of distinct values of `attr`.
    pub fn value_count(&self, attr: Attr) -> usize {
        self.lexicons[attr as usize].len()
    }

    /// The id of `value` in the attribute's lexicon, if the value occurs.
    pub fn value_id(&self, attr: Attr, value: &str) -> Option<u32> {
        self.lexicons[attr as usize].id(value)
    }

    /// The text of value id `id` (panics on out-of-range ids).
    pub fn value(&self, attr: Attr, id: u32) -> &str {
        self.lexicons[attr as usize].value(id)
    }

    /// Value id of `attr` at token `position`.
    pub fn token_id(&self, attr: Attr, position: u32) -> u32 {
        self.cols[attr as usize][position as usize]
    }

    /// Value text of `attr` at token `position`.
    pub fn token_value(&self, attr: Attr, position: u32) -> &str {
        self.value(attr, self.token_id(attr, position))
    }

    /// Occurrence count of `value`; 0 for values never seen.
    pub fn freq(&self, attr: Attr, value: &str) -> u64 {
        match self.value_id(attr, value) {
            Some(id) => self.freq_by_id(attr, id),
            None => 0,
        }
    }

    pub fn freq_by_id(&self, attr: Attr, id: u32) -> u64 {
        self.lexicons[attr as usize].postings[id as usize].len() as u64
    }

    /// Sorted positions at which value id `id` occurs.
    pub fn postings(&self, attr: Attr, id: u32) -> &[u32] {
        &self.lexicons[attr as usize].postings[id as usize]
    }

    /// Coarse POS of a tag string per the corpus pos map.
    pub fn coarse_pos(&self, tag: &str) -> CoarsePos {
        self.pos_map.coarse(tag)
    }

    /// Coarse POS of a tag value id (precomputed).
    pub fn coarse_of_tag_id(&self, tag_id: u32) -> CoarsePos {
        self.tag_coarse[tag_id as usize]
    }

    /// Coarse POS of the token at `position`.
    pub fn token_coarse(&self, position: u32) -> CoarsePos {
        self.coarse_of_tag_id(self.token_id(Attr::Tag, position))
    }

    pub fn pos_map(&self) -> &PosMap {
        &self.pos_map
    }

    /// Iterate all value ids of one attribute with their text.
    pub fn values(&self, attr: Attr) -> impl Iterator<Item = (u32, &str)> {
        self.lexicons[attr as usize]
            .values
            .iter()
            .enumerate()
            .map(|(id, v)| (id as u32, v.as_str()))
    }

    /// Check the structural invariants; used by tests and after index load.
    pub fn verify(&self) -> Result<(), String> {
        let n = self.token_count();
        for col in &self.cols {
            if col.len() != n {
                return Err("attribute columns have unequal lengths".into());
            }
        }
        // Sentences: sorted, disjoint, covering every position exactly once.
        let mut expect = 0u32;
        for &(start, end) in &self.sentences {
            if start != expect || end <= start {
                return Err(format!(
                    "sentence [{start}, {end}) breaks coverage at position {expect}"
                ));
            }
            expect = end;
        }
        if expect as usize != n {
            return Err(format!(
                "sentences cover {expect} positions, corpus has {n}"
            ));
        }
        // Postings: strictly increasing, consistent with columns, covering.
        for attr in ATTRS {
            let lex = &self.lexicons[attr as usize];
            let mut covered = 0usize;
            for (id, positions) in lex.postings.iter().enumerate() {
                covered += positions.len();
                let mut last = None;
                for &p in positions {
                    if last.is_some_and(|l| p <= l) {
                        return Err(format!(
                            "{} postings for id {id} not strictly increasing",
                            attr.as_str()
                        ));
                    }
                    if self.cols[attr as usize][p as usize] != id as u32 {
                        return Err(format!(
                            "{} posting {p} disagrees with the token column",
                            attr.as_str()
                        ));
                    }
                    last = Some(p);
                }
            }
            if covered != n {
                return Err(format!(
                    "{} postings cover {covered} positions, corpus has {n}",
                    attr.as_str()
                ));
            }
        }
        Ok(())
    }
}
