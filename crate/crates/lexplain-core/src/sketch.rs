//! Collocation counting and scoring: run every grammar relation over the
//! corpus, tally (headword, relation, collocate) triples, score them, and
//! serve ranked per-relation collocate lists in both directions.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Attr, Corpus};
use crate::cql::CompiledQuery;
use crate::error::{SketchError, UnknownRelation};
use crate::grammar::Grammar;
use crate::pos::CoarsePos;

/// A lemma qualified by its coarse POS — the identity of heads, collocates
/// and thesaurus entries throughout the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LemmaPos {
    pub lemma: String,
    pub pos: CoarsePos,
}

impl LemmaPos {
    pub fn new(lemma: impl Into<String>, pos: CoarsePos) -> LemmaPos {
        LemmaPos {
            lemma: lemma.into(),
            pos,
        }
    }
}

/// One ranked entry of a sketch group: the collocate (forward direction)
/// or the headword (inverse direction), with the triple's count and score.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocateEntry {
    pub item: LemmaPos,
    /// Co-occurrence count f_xy of the underlying triple.
    pub pair_freq: u64,
    /// logDice of the triple (kept in both ranking modes).
    pub score: f64,
}

/// Which key orders sketch groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMode {
    /// Order by logDice (score desc, pair_freq desc, lemma asc).
    LogDice,
    /// Order by raw co-occurrence count (pair_freq desc, lemma asc).
    RawFreq,
}

/// Relation metadata copied out of the grammar at build time, in grammar
/// order, so downstream consumers need no separate grammar handle.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationInfo {
    pub name: String,
    pub head_pos: CoarsePos,
    pub collocate_pos: CoarsePos,
    pub gloss_key: String,
}

type Groups = BTreeMap<LemmaPos, BTreeMap<String, Vec<CollocateEntry>>>;

/// All scored triples of one corpus+grammar run, grouped for lookup by
/// head (forward) and by collocate (inverse), plus the corpus marginals.
#[derive(Debug)]
pub struct SketchIndex {
    forward: Groups,
    inverse: Groups,
    marginals: BTreeMap<LemmaPos, u64>,
    relations: Vec<RelationInfo>,
}

/// logDice association score: `14 + log2(2·f_xy / (f_x + f_y))`.
///
/// Bounded above by 14, reached exactly when `f_xy == f_x == f_y`;
/// corpus-size independent; monotone in `f_xy` for fixed marginals.
/// All three counts must be ≥ 1, and the pair count may exceed neither
/// marginal — that would mean the tally and the corpus disagree.
pub fn log_dice(f_xy: u64, f_x: u64, f_y: u64) -> Result<f64, SketchError> {
    debug_assert!(f_xy >= 1 && f_x >= 1 && f_y >= 1);
    if f_xy > f_x || f_xy > f_y {
        return Err(SketchError {
            head: None,
            collocate: None,
            pair_freq: f_xy,
            head_freq: f_x,
            coll_freq: f_y,
        });
    }
    Ok(14.0 + (2.0 * f_xy as f64 / (f_x as f64 + f_y as f64)).log2())
}

/// Count and score all relation triples; logDice group ordering.
pub fn build_sketches(
    corpus: &Corpus,
    grammar: &Grammar,
    min_pair_freq: u64,
) -> Result<SketchIndex, SketchError> {
    build_sketches_with_mode(corpus, grammar, min_pair_freq, ScoreMode::LogDice)
}

/// As [`build_sketches`], with an explicit ranking mode. Triples whose
/// count falls below `min_pair_freq` are dropped. A match contributes one
/// count with head = lemma at the label-1 position and collocate = lemma at
/// the label-2 position; matches whose label-1 token has a coarse POS other
/// than the relation's head POS are skipped.
pub fn build_sketches_with_mode(
    corpus: &Corpus,
    grammar: &Grammar,
    min_pair_freq: u64,
    mode: ScoreMode,
) -> Result<SketchIndex, SketchError> {
    // Compile every query of every relation once.
    let compiled: Vec<(usize, CompiledQuery)> = grammar
        .relations
        .iter()
        .enumerate()
        .flat_map(|(ri, rel)| {
            rel.queries
                .iter()
                .map(move |q| (ri, CompiledQuery::new(q, corpus)))
        })
        .collect();

    // Tally per sentence in parallel; merging sums is associative, and the
    // final sort makes the result order-independent.
    type Key = (usize, u32, u32, CoarsePos);
    let tally: HashMap<Key, u64> = corpus
        .sentences()
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<Key, u64>, &(start, end)| {
            let mut matches = Vec::new();
            for (ri, query) in &compiled {
                matches.clear();
                query.matches_in_range(start, end, &mut matches);
                let head_pos = grammar.relations[*ri].head_pos;
                for m in &matches {
                    let (Some(hp), Some(cp)) = (m.binding(1), m.binding(2)) else {
                        continue;
                    };
                    if corpus.token_coarse(hp) != head_pos {
                        continue;
                    }
                    let key = (
                        *ri,
                        corpus.token_id(Attr::Lemma, hp),
                        corpus.token_id(Attr::Lemma, cp),
                        corpus.token_coarse(cp),
                    );
                    *acc.entry(key).or_insert(0) += 1;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });

    // Corpus-wide (lemma, coarse POS) marginals.
    let mut marginal_ids: HashMap<(u32, CoarsePos), u64> = HashMap::new();
    for p in 0..corpus.token_count() as u32 {
        let key = (corpus.token_id(Attr::Lemma, p), corpus.token_coarse(p));
        *marginal_ids.entry(key).or_insert(0) += 1;
    }

    let mut forward: Groups = BTreeMap::new();
    let mut inverse: Groups = BTreeMap::new();
    for ((ri, head_id, coll_id, coll_pos), pair_freq) in tally {
        if pair_freq < min_pair_freq {
            continue;
        }
        let relation = &grammar.relations[ri];
        let head = LemmaPos::new(corpus.value(Attr::Lemma, head_id), relation.head_pos);
        let collocate = LemmaPos::new(corpus.value(Attr::Lemma, coll_id), coll_pos);
        let f_x = marginal_ids[&(head_id, relation.head_pos)];
        let f_y = marginal_ids[&(coll_id, coll_pos)];
        let score = log_dice(pair_freq, f_x, f_y).map_err(|mut e| {
            e.head = Some(head.lemma.clone());
            e.collocate = Some(collocate.lemma.clone());
            e
        })?;
        forward
            .entry(head.clone())
            .or_default()
            .entry(relation.name.clone())
            .or_default()
            .push(CollocateEntry {
                item: collocate.clone(),
                pair_freq,
                score,
            });
        inverse
            .entry(collocate)
            .or_default()
            .entry(relation.name.clone())
            .or_default()
            .push(CollocateEntry {
                item: head,
                pair_freq,
                score,
            });
    }

    for groups in [&mut forward, &mut inverse] {
        for by_relation in groups.values_mut() {
            for entries in by_relation.values_mut() {
                sort_entries(entries, mode);
            }
        }
    }

    let marginals = marginal_ids
        .into_iter()
        .map(|((id, pos), count)| (LemmaPos::new(corpus.value(Attr::Lemma, id), pos), count))
        .collect();

    Ok(SketchIndex {
        forward,
        inverse,
        marginals,
        relations: grammar
            .relations
            .iter()
            .map(|r| RelationInfo {
                name: r.name.clone(),
                head_pos: r.head_pos,
                collocate_pos: r.collocate_pos,
                gloss_key: r.gloss_key.clone(),
            })
            .collect(),
    })
}

fn sort_entries(entries: &mut [CollocateEntry], mode: ScoreMode) {
    match mode {
        ScoreMode::LogDice => entries.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then(b.pair_freq.cmp(&a.pair_freq))
                .then_with(|| a.item.cmp(&b.item))
        }),
        ScoreMode::RawFreq => entries.sort_by(|a, b| {
            b.pair_freq
                .cmp(&a.pair_freq)
                .then_with(|| a.item.cmp(&b.item))
        }),
    }
}

impl SketchIndex {
    /// Top `limit` collocates of `head` under `relation`, in group order.
    /// Unknown heads yield an empty list; unknown relations are an error.
    pub fn word_sketch(
        &self,
        head: &LemmaPos,
        relation: &str,
        limit: usize,
    ) -> Result<&[CollocateEntry], UnknownRelation> {
        self.require_relation(relation)?;
        Ok(Self::lookup(&self.forward, head, relation, limit))
    }

    /// Top `limit` headwords that take `collocate` under `relation` — the
    /// inverse direction, e.g. "which verbs have this noun as subject".
    pub fn inverse_sketch(
        &self,
        collocate: &LemmaPos,
        relation: &str,
        limit: usize,
    ) -> Result<&[CollocateEntry], UnknownRelation> {
        self.require_relation(relation)?;
        Ok(Self::lookup(&self.inverse, collocate, relation, limit))
    }

    fn lookup<'a>(
        groups: &'a Groups,
        owner: &LemmaPos,
        relation: &str,
        limit: usize,
    ) -> &'a [CollocateEntry] {
        match groups.get(owner).and_then(|g| g.get(relation)) {
            Some(entries) => &entries[..limit.min(entries.len())],
            None => &[],
        }
    }

    fn require_relation(&self, name: &str) -> Result<(), UnknownRelation> {
        if self.relations.iter().any(|r| r.name == name) {
            Ok(())
        } else {
            Err(UnknownRelation(name.to_string()))
        }
    }

    /// All relation groups of `head`, keyed by relation name.
    pub fn sketch_of(&self, head: &LemmaPos) -> Option<&BTreeMap<String, Vec<CollocateEntry>>> {
        self.forward.get(head)
    }

    /// All inverse groups in which `collocate` appears.
    pub fn inverse_of(
        &self,
        collocate: &LemmaPos,
    ) -> Option<&BTreeMap<String, Vec<CollocateEntry>>> {
        self.inverse.get(collocate)
    }

    /// Heads with at least one forward triple, in lexicon order.
    pub fn heads(&self) -> impl Iterator<Item = &LemmaPos> {
        self.forward.keys()
    }

    /// Relation metadata in grammar order.
    pub fn relations(&self) -> &[RelationInfo] {
        &self.relations
    }

    /// Names of relations feeding explanation line `gloss_key`, in grammar
    /// order.
    pub fn relations_for_gloss<'a>(&'a self, gloss_key: &'a str) -> impl Iterator<Item = &'a str> {
        self.relations
            .iter()
            .filter(move |r| r.gloss_key == gloss_key)
            .map(|r| r.name.as_str())
    }

    /// Corpus frequency of a (lemma, coarse POS) pair.
    pub fn marginal(&self, key: &LemmaPos) -> u64 {
        self.marginals.get(key).copied().unwrap_or(0)
    }

    /// True when the index holds no triples at all.
    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}
