//! Distributional similarity from shared sketch contexts.
//!
//! A word's context vector maps each (relation, collocate) pair of its
//! sketch to a non-negative association score `AS = max(score, 0)`. Two
//! same-POS words sharing at least two contexts are scored
//!
//! ```text
//!                Σ over shared c of (AS₁(c) + AS₂(c) − (AS₁(c) − AS₂(c))²/50)
//! sim(w₁, w₂) = ───────────────────────────────────────────────────────────────
//!                              Σ all AS₁  +  Σ all AS₂
//! ```
//!
//! clamped into [0, 1]: the squared-difference penalty can outweigh the
//! rewards for wildly uneven vectors, and a negative similarity means
//! nothing downstream. Contexts are always accumulated in ascending
//! (relation, collocate) order, which makes the score bitwise symmetric
//! and puts identical vectors at exactly 1.0.

use crate::sketch::{LemmaPos, SketchIndex};

/// One thesaurus neighbor with its similarity in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityResult {
    pub neighbor: LemmaPos,
    pub similarity: f64,
}

/// Sorted (relation, collocate) → AS entries of one word, with the AS sum.
struct ContextVector<'a> {
    entries: Vec<((&'a str, &'a LemmaPos), f64)>,
    total: f64,
}

fn vector<'a>(index: &'a SketchIndex, owner: &LemmaPos) -> Option<ContextVector<'a>> {
    let groups = index.sketch_of(owner)?;
    let mut entries: Vec<((&str, &LemmaPos), f64)> = groups
        .iter()
        .flat_map(|(relation, list)| {
            list.iter()
                .map(move |e| ((relation.as_str(), &e.item), e.score.max(0.0)))
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let total = entries.iter().map(|&(_, score)| score).sum();
    Some(ContextVector { entries, total })
}

fn similarity_of(a: &ContextVector, b: &ContextVector) -> Option<f64> {
    let mut shared = 0usize;
    let mut numerator = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.entries.len() && j < b.entries.len() {
        match a.entries[i].0.cmp(&b.entries[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let (asa, asb) = (a.entries[i].1, b.entries[j].1);
                let d = asa - asb;
                numerator += asa + asb - d * d / 50.0;
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    if shared < 2 {
        return None;
    }
    let denominator = a.total + b.total;
    if denominator == 0.0 {
        return None;
    }
    Some((numerator / denominator).clamp(0.0, 1.0))
}

/// Similarity of two specific words, or `None` when they are not
/// comparable (different POS, missing sketch data, fewer than two shared
/// contexts, or an all-zero denominator).
pub fn pair_similarity(index: &SketchIndex, a: &LemmaPos, b: &LemmaPos) -> Option<f64> {
    if a.pos != b.pos {
        return None;
    }
    let va = vector(index, a)?;
    let vb = vector(index, b)?;
    similarity_of(&va, &vb)
}

/// The `limit` most similar same-POS words, sorted by (similarity desc,
/// lemma asc). Words without comparable data are excluded; an unknown
/// head yields an empty list.
pub fn similar(index: &SketchIndex, head: &LemmaPos, limit: usize) -> Vec<SimilarityResult> {
    let Some(own) = vector(index, head) else {
        return Vec::new();
    };
    let mut results: Vec<SimilarityResult> = index
        .heads()
        .filter(|cand| cand.pos == head.pos && *cand != head)
        .filter_map(|cand| {
            let cv = vector(index, cand)?;
            let similarity = similarity_of(&own, &cv)?;
            Some(SimilarityResult {
                neighbor: cand.clone(),
                similarity,
            })
        })
        .collect();
    results.sort_by(|a, b| {
        b.similarity
            .total_cmp(&a.similarity)
            .then_with(|| a.neighbor.cmp(&b.neighbor))
    });
    results.truncate(limit);
    results
}

/// Thesaurus access used when composing explanations; allows tests to
/// substitute fixed neighbor lists.
pub trait ThesaurusAccess {
    /// Neighbor lemmas of `head`, best first, at most `limit`.
    fn neighbors(&self, head: &LemmaPos, limit: usize) -> Vec<String>;
}

impl ThesaurusAccess for SketchIndex {
    fn neighbors(&self, head: &LemmaPos, limit: usize) -> Vec<String> {
        similar(self, head, limit)
            .into_iter()
            .map(|r| r.neighbor.lemma)
            .collect()
    }
}
