//! Explanation evaluation: automatic per-explanation indicators, manual
//! annotation tables, and aggregation into ratio tables.
//!
//! Indicators are presence flags over an explanation, used as quality
//! proxies. Most are detected automatically from the composed lines; two of
//! them — `troponym` and `data_issues` — need human judgment and are only
//! ever filled from an annotation table via
//! [`IndicatorSet::apply_annotation`].
//!
//! Automatic detection keys on the line keys of the embedded schemas and the
//! relation names of the bundled grammar (`hypernym_of`, `hyponym_example`,
//! `meronym_have`, `meronym_contain`, `holonym_have`). A custom grammar that
//! renames those relations still composes fine, but the taxonomy flags will
//! not light up.

mod annotations;
mod report;

pub use annotations::{parse_annotations, AnnotationRecord, Quality};
pub use report::{Ratio, RatioRow, RatioTable};

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Attr, Corpus};
use crate::error::EvaluateError;
use crate::explain::Explanation;
use crate::pos::CoarsePos;

/// Default infrequency threshold: an explanation is flagged when any
/// displayed item occurs fewer than this many times per million corpus
/// tokens.
pub const DEFAULT_INFREQUENCY_PER_MILLION: f64 = 5.0;

/// One presence flag. The declaration order is the row order of rendered
/// indicator tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    Synonym,
    JModifier,
    Subject,
    Object,
    Hypernym,
    Hyponym,
    Meronym,
    Holonym,
    AModifier,
    SuchAs,
    Troponym,
    Opposite,
    Pp,
    Infrequent,
    DataIssues,
}

impl Indicator {
    pub const ALL: [Indicator; 15] = [
        Indicator::Synonym,
        Indicator::JModifier,
        Indicator::Subject,
        Indicator::Object,
        Indicator::Hypernym,
        Indicator::Hyponym,
        Indicator::Meronym,
        Indicator::Holonym,
        Indicator::AModifier,
        Indicator::SuchAs,
        Indicator::Troponym,
        Indicator::Opposite,
        Indicator::Pp,
        Indicator::Infrequent,
        Indicator::DataIssues,
    ];

    /// Row label used in rendered tables.
    pub fn label(&self) -> &'static str {
        match self {
            Indicator::Synonym => "synonym",
            Indicator::JModifier => "J modifier",
            Indicator::Subject => "subject",
            Indicator::Object => "object",
            Indicator::Hypernym => "hypernym",
            Indicator::Hyponym => "hyponym",
            Indicator::Meronym => "meronym",
            Indicator::Holonym => "holonym",
            Indicator::AModifier => "A modifier",
            Indicator::SuchAs => "such as",
            Indicator::Troponym => "troponym",
            Indicator::Opposite => "opposite",
            Indicator::Pp => "PP",
            Indicator::Infrequent => "infrequent",
            Indicator::DataIssues => "data issues",
        }
    }

    /// Whether the flag is meaningful for a part of speech. Inapplicable
    /// flags are absent from an [`IndicatorSet`], not false: the taxonomy
    /// flags only make sense for nouns, valency for nouns and verbs,
    /// opposites and `such as` for adjectives, adverbial modifiers,
    /// troponyms and prepositional phrases for verbs.
    pub fn applies_to(&self, pos: CoarsePos) -> bool {
        use CoarsePos::{J, N, V};
        match self {
            Indicator::Synonym | Indicator::Infrequent | Indicator::DataIssues => {
                matches!(pos, N | J | V)
            }
            Indicator::JModifier
            | Indicator::Hypernym
            | Indicator::Hyponym
            | Indicator::Meronym
            | Indicator::Holonym => pos == N,
            Indicator::Subject | Indicator::Object => matches!(pos, N | V),
            Indicator::AModifier | Indicator::Troponym | Indicator::Pp => pos == V,
            Indicator::SuchAs | Indicator::Opposite => pos == J,
        }
    }
}

/// The detected flags for one explanation. Only flags applicable to the
/// headword's part of speech are present; [`IndicatorSet::get`] returns
/// `None` for the rest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorSet {
    pub headword: String,
    pub pos: CoarsePos,
    flags: BTreeMap<Indicator, bool>,
}

impl IndicatorSet {
    /// A set with every applicable flag present and false.
    pub fn new(headword: impl Into<String>, pos: CoarsePos) -> IndicatorSet {
        let flags = Indicator::ALL
            .into_iter()
            .filter(|i| i.applies_to(pos))
            .map(|i| (i, false))
            .collect();
        IndicatorSet {
            headword: headword.into(),
            pos,
            flags,
        }
    }

    /// `Some(value)` for an applicable flag, `None` for an inapplicable one.
    pub fn get(&self, indicator: Indicator) -> Option<bool> {
        self.flags.get(&indicator).copied()
    }

    /// Set an applicable flag; setting an inapplicable one is an error.
    pub fn set(&mut self, indicator: Indicator, value: bool) -> Result<(), EvaluateError> {
        if !indicator.applies_to(self.pos) {
            return Err(EvaluateError::Inapplicable {
                indicator: indicator.label().to_string(),
                pos: self.pos.to_string(),
            });
        }
        self.flags.insert(indicator, value);
        Ok(())
    }

    /// All applicable flags in table row order.
    pub fn flags(&self) -> impl Iterator<Item = (Indicator, bool)> + '_ {
        self.flags.iter().map(|(i, v)| (*i, *v))
    }

    /// Fold in the human-judged flags from an annotation record. The caller
    /// is responsible for pairing records with the matching headword and
    /// part of speech.
    pub fn apply_annotation(&mut self, record: &AnnotationRecord) {
        if record.data_issues {
            self.mark(Indicator::DataIssues);
        }
        if record.troponym == Some(true) {
            self.mark(Indicator::Troponym);
        }
    }

    /// Set a flag true if it applies to this part of speech, else ignore it.
    fn mark(&mut self, indicator: Indicator) {
        if indicator.applies_to(self.pos) {
            self.flags.insert(indicator, true);
        }
    }
}

/// Detect the automatic indicators for one explanation.
///
/// `threshold_per_million` is the infrequency cutoff in occurrences per
/// million corpus tokens (see [`DEFAULT_INFREQUENCY_PER_MILLION`]); an item
/// whose lemma falls below it flags the whole explanation as containing
/// infrequent material. Every displayed item must occur in the corpus the
/// explanation was built from — an unknown lemma means the pair is
/// mismatched and is an error. `troponym` and `data_issues` are left false;
/// they come from annotations.
pub fn detect_indicators(
    explanation: &Explanation,
    corpus: &Corpus,
    threshold_per_million: f64,
) -> Result<IndicatorSet, EvaluateError> {
    let mut set = IndicatorSet::new(explanation.headword.clone(), explanation.pos);
    let mut infrequent = false;
    for line in &explanation.lines {
        for source in &line.sources {
            let relation = source.strip_prefix("inverse ").unwrap_or(source);
            match relation {
                "thesaurus" => set.mark(Indicator::Synonym),
                "hypernym_of" => set.mark(Indicator::Hypernym),
                "hyponym_example" => set.mark(Indicator::Hyponym),
                "meronym_have" | "meronym_contain" => set.mark(Indicator::Meronym),
                "holonym_have" => set.mark(Indicator::Holonym),
                _ => {}
            }
        }
        match line.key.as_str() {
            "can_be" => set.mark(Indicator::JModifier),
            "can_do" | "typical_subject" => set.mark(Indicator::Subject),
            "done_to" | "typical_object" => set.mark(Indicator::Object),
            "for_example" => set.mark(Indicator::Hyponym),
            "can_have" => set.mark(Indicator::Meronym),
            "contained_in" => set.mark(Indicator::Holonym),
            "how" => set.mark(Indicator::AModifier),
            "such_as" => set.mark(Indicator::SuchAs),
            "opposite" => set.mark(Indicator::Opposite),
            "with_prep" => set.mark(Indicator::Pp),
            _ => {}
        }
        for item in &line.items {
            if corpus.value_id(Attr::Lemma, item).is_none() {
                return Err(EvaluateError::UnknownLemma { item: item.clone() });
            }
            let freq = corpus.freq(Attr::Lemma, item);
            if (freq as f64) * 1_000_000.0 < threshold_per_million * corpus.token_count() as f64 {
                infrequent = true;
            }
        }
    }
    if infrequent {
        set.mark(Indicator::Infrequent);
    }
    Ok(set)
}

const POS_ORDER: [CoarsePos; 5] = [
    CoarsePos::N,
    CoarsePos::J,
    CoarsePos::V,
    CoarsePos::A,
    CoarsePos::Other,
];

/// Aggregate indicator sets into a table with one column per part of speech
/// present and one row per indicator applicable to at least one of those.
/// Cells for inapplicable (indicator, POS) combinations are dashes. Empty
/// input yields an empty table.
pub fn aggregate_indicators(sets: &[IndicatorSet]) -> RatioTable {
    let columns: Vec<CoarsePos> = POS_ORDER
        .into_iter()
        .filter(|p| sets.iter().any(|s| s.pos == *p))
        .collect();
    let denominators: Vec<u64> = columns
        .iter()
        .map(|p| sets.iter().filter(|s| s.pos == *p).count() as u64)
        .collect();
    let mut rows = Vec::new();
    for indicator in Indicator::ALL {
        if !columns.iter().any(|p| indicator.applies_to(*p)) {
            continue;
        }
        let cells = columns
            .iter()
            .zip(&denominators)
            .map(|(pos, &den)| {
                if indicator.applies_to(*pos) {
                    let num = sets
                        .iter()
                        .filter(|s| s.pos == *pos && s.get(indicator) == Some(true))
                        .count() as u64;
                    Some(Ratio::new(num, den))
                } else {
                    None
                }
            })
            .collect();
        rows.push(RatioRow {
            label: indicator.label().to_string(),
            cells,
        });
    }
    RatioTable {
        columns: columns.iter().map(|p| p.as_str().to_string()).collect(),
        rows,
    }
}

/// Aggregate quality labels into a table with one row per part of speech and
/// good / post-edit / bad columns. Each headword may be annotated once per
/// part of speech; the three counts of every row sum to its denominator.
pub fn aggregate_quality(records: &[AnnotationRecord]) -> Result<RatioTable, EvaluateError> {
    let mut seen = HashSet::new();
    for record in records {
        if !seen.insert((record.headword.as_str(), record.pos)) {
            return Err(EvaluateError::DuplicateAnnotation {
                headword: record.headword.clone(),
                pos: record.pos.to_string(),
            });
        }
    }
    let mut rows = Vec::new();
    for pos in POS_ORDER {
        let of_pos: Vec<&AnnotationRecord> = records.iter().filter(|r| r.pos == pos).collect();
        if of_pos.is_empty() {
            continue;
        }
        let den = of_pos.len() as u64;
        let count = |q: Quality| of_pos.iter().filter(|r| r.quality == q).count() as u64;
        rows.push(RatioRow {
            label: pos.as_str().to_string(),
            cells: vec![
                Some(Ratio::new(count(Quality::Good), den)),
                Some(Ratio::new(count(Quality::PostEdit), den)),
                Some(Ratio::new(count(Quality::Bad), den)),
            ],
        });
    }
    Ok(RatioTable {
        columns: vec!["good".into(), "post-edit".into(), "bad".into()],
        rows,
    })
}

/// Share of a batch whose explanations render visible content — anything
/// that would show the `no data` sentinel (no sketch data at all, or every
/// line filtered away) counts as uncovered. Errors on an empty batch.
pub fn coverage_rate(explanations: &[Explanation]) -> Result<Ratio, EvaluateError> {
    if explanations.is_empty() {
        return Err(EvaluateError::EmptyBatch);
    }
    let covered = explanations.iter().filter(|e| !e.lines.is_empty()).count() as u64;
    Ok(Ratio::new(covered, explanations.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ingest_vertical;
    use crate::explain::ExplanationLine;
    use crate::pos::PosMap;

    fn line(key: &str, items: &[&str], sources: &[&str]) -> ExplanationLine {
        ExplanationLine {
            key: key.into(),
            pattern: format!("%(head) {key} %(items)"),
            items: items.iter().map(|s| s.to_string()).collect(),
            sources: sources.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn explanation(pos: CoarsePos, lines: Vec<ExplanationLine>) -> Explanation {
        Explanation {
            headword: "bone".into(),
            pos,
            no_data: false,
            lines,
        }
    }

    /// Ten tokens: bone ×3, joint ×2, muscle ×2, heal ×2, rare ×1.
    fn corpus() -> Corpus {
        let text = "<s>\n\
            bone\tbone\tNN\n\
            joint\tjoint\tNN\n\
            muscle\tmuscle\tNN\n\
            bone\tbone\tNN\n\
            heal\theal\tVB\n\
            rare\trare\tJJ\n\
            joint\tjoint\tNN\n\
            muscle\tmuscle\tNN\n\
            bone\tbone\tNN\n\
            heal\theal\tVB\n\
            </s>\n";
        ingest_vertical(text.as_bytes(), PosMap::penn_default()).unwrap()
    }

    #[test]
    fn inapplicable_flags_are_absent_not_false() {
        let set = IndicatorSet::new("bone", CoarsePos::N);
        assert_eq!(set.get(Indicator::Synonym), Some(false));
        assert_eq!(set.get(Indicator::Opposite), None);
        assert_eq!(set.get(Indicator::Troponym), None);
        let set = IndicatorSet::new("brittle", CoarsePos::J);
        assert_eq!(set.get(Indicator::Opposite), Some(false));
        assert_eq!(set.get(Indicator::Subject), None);
        let set = IndicatorSet::new("heal", CoarsePos::V);
        assert_eq!(set.get(Indicator::Troponym), Some(false));
        assert_eq!(set.get(Indicator::Hypernym), None);
    }

    #[test]
    fn setting_an_inapplicable_flag_is_an_error() {
        let mut set = IndicatorSet::new("bone", CoarsePos::N);
        assert!(set.set(Indicator::Hypernym, true).is_ok());
        assert!(matches!(
            set.set(Indicator::Opposite, true),
            Err(EvaluateError::Inapplicable { .. })
        ));
    }

    #[test]
    fn detects_noun_flags_from_keys_and_sources() {
        let expl = explanation(
            CoarsePos::N,
            vec![
                line(
                    "similar_meaning",
                    &["joint", "muscle"],
                    &["coordination", "hypernym_of", "thesaurus"],
                ),
                line("can_be", &["rare"], &["adj_modifier"]),
                line("contained_in", &["joint"], &["holonym_have"]),
            ],
        );
        let set = detect_indicators(&expl, &corpus(), 5.0).unwrap();
        assert_eq!(set.get(Indicator::Synonym), Some(true));
        assert_eq!(set.get(Indicator::Hypernym), Some(true));
        assert_eq!(set.get(Indicator::JModifier), Some(true));
        assert_eq!(set.get(Indicator::Holonym), Some(true));
        assert_eq!(set.get(Indicator::Hyponym), Some(false));
        assert_eq!(set.get(Indicator::Meronym), Some(false));
        assert_eq!(set.get(Indicator::Subject), Some(false));
        // Inapplicable for nouns regardless of content.
        assert_eq!(set.get(Indicator::Opposite), None);
    }

    #[test]
    fn detects_verb_flags_including_inverse_sources() {
        let expl = Explanation {
            headword: "heal".into(),
            pos: CoarsePos::V,
            no_data: false,
            lines: vec![
                line("typical_subject", &["bone"], &["inverse subject_verb"]),
                line("typical_object", &["joint"], &["inverse object_verb"]),
                line("how", &["rare"], &["adv_modifier"]),
                line("with_prep", &["muscle"], &["verb_prep"]),
            ],
        };
        let set = detect_indicators(&expl, &corpus(), 5.0).unwrap();
        assert_eq!(set.get(Indicator::Subject), Some(true));
        assert_eq!(set.get(Indicator::Object), Some(true));
        assert_eq!(set.get(Indicator::AModifier), Some(true));
        assert_eq!(set.get(Indicator::Pp), Some(true));
        assert_eq!(set.get(Indicator::Synonym), Some(false));
        // Human-judged flags stay false without annotations.
        assert_eq!(set.get(Indicator::Troponym), Some(false));
        assert_eq!(set.get(Indicator::DataIssues), Some(false));
    }

    #[test]
    fn infrequent_items_flag_the_explanation() {
        // "rare" occurs once in ten tokens = 100,000 per million.
        let expl = explanation(
            CoarsePos::N,
            vec![line("can_be", &["rare"], &["adj_modifier"])],
        );
        let set = detect_indicators(&expl, &corpus(), 150_000.0).unwrap();
        assert_eq!(set.get(Indicator::Infrequent), Some(true));
        let set = detect_indicators(&expl, &corpus(), 50_000.0).unwrap();
        assert_eq!(set.get(Indicator::Infrequent), Some(false));
    }

    #[test]
    fn unknown_items_are_a_corpus_mismatch() {
        let expl = explanation(
            CoarsePos::N,
            vec![line("can_be", &["ghost"], &["adj_modifier"])],
        );
        match detect_indicators(&expl, &corpus(), 5.0) {
            Err(EvaluateError::UnknownLemma { item }) => assert_eq!(item, "ghost"),
            other => panic!("expected unknown-lemma error, got {other:?}"),
        }
    }

    #[test]
    fn detection_is_deterministic() {
        let expl = explanation(
            CoarsePos::N,
            vec![line("can_be", &["rare"], &["adj_modifier"])],
        );
        let corpus = corpus();
        let a = detect_indicators(&expl, &corpus, 5.0).unwrap();
        let b = detect_indicators(&expl, &corpus, 5.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn annotations_supply_the_human_judged_flags() {
        let mut set = IndicatorSet::new("heal", CoarsePos::V);
        set.apply_annotation(&AnnotationRecord {
            headword: "heal".into(),
            pos: CoarsePos::V,
            quality: Quality::Good,
            data_issues: true,
            troponym: Some(true),
            notes: String::new(),
        });
        assert_eq!(set.get(Indicator::DataIssues), Some(true));
        assert_eq!(set.get(Indicator::Troponym), Some(true));

        // Troponym is inapplicable to nouns and is silently skipped.
        let mut set = IndicatorSet::new("bone", CoarsePos::N);
        set.apply_annotation(&AnnotationRecord {
            headword: "bone".into(),
            pos: CoarsePos::N,
            quality: Quality::Good,
            data_issues: false,
            troponym: Some(true),
            notes: String::new(),
        });
        assert_eq!(set.get(Indicator::Troponym), None);
        assert_eq!(set.get(Indicator::DataIssues), Some(false));
    }

    fn flagged_sets(
        pos: CoarsePos,
        total: usize,
        flagged: usize,
        ind: Indicator,
    ) -> Vec<IndicatorSet> {
        (0..total)
            .map(|i| {
                let mut set = IndicatorSet::new(format!("w{i}"), pos);
                if i < flagged {
                    set.set(ind, true).unwrap();
                }
                set
            })
            .collect()
    }

    #[test]
    fn indicator_aggregation_reproduces_published_ratios() {
        let mut sets = flagged_sets(CoarsePos::N, 71, 66, Indicator::Synonym);
        sets.extend(flagged_sets(CoarsePos::J, 33, 26, Indicator::Synonym));
        sets.extend(flagged_sets(CoarsePos::V, 42, 38, Indicator::Synonym));
        let table = aggregate_indicators(&sets);
        assert_eq!(table.columns, ["N", "J", "V"]);
        let synonym = &table.rows[0];
        assert_eq!(synonym.label, "synonym");
        let percents: Vec<String> = synonym
            .cells
            .iter()
            .map(|c| c.unwrap().percent_text())
            .collect();
        assert_eq!(percents, ["92.96", "78.79", "90.48"]);

        let opposite = table.rows.iter().find(|r| r.label == "opposite").unwrap();
        assert_eq!(opposite.cells[0], None); // N
        assert_eq!(opposite.cells[1], Some(Ratio::new(0, 33))); // J
        assert_eq!(opposite.cells[2], None); // V
    }

    #[test]
    fn empty_aggregation_input_yields_an_empty_table() {
        let table = aggregate_indicators(&[]);
        assert!(table.is_empty());
        assert!(table.columns.is_empty());
    }

    #[test]
    fn rows_only_cover_present_parts_of_speech() {
        let sets = flagged_sets(CoarsePos::J, 3, 1, Indicator::Opposite);
        let table = aggregate_indicators(&sets);
        assert_eq!(table.columns, ["J"]);
        let labels: Vec<&str> = table.rows.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(
            labels,
            [
                "synonym",
                "such as",
                "opposite",
                "infrequent",
                "data issues"
            ]
        );
    }

    fn quality_records(
        pos: CoarsePos,
        good: usize,
        post_edit: usize,
        bad: usize,
    ) -> Vec<AnnotationRecord> {
        let mut records = Vec::new();
        for (quality, count) in [
            (Quality::Good, good),
            (Quality::PostEdit, post_edit),
            (Quality::Bad, bad),
        ] {
            for _ in 0..count {
                records.push(AnnotationRecord {
                    headword: format!("w{}", records.len()),
                    pos,
                    quality,
                    data_issues: false,
                    troponym: None,
                    notes: String::new(),
                });
            }
        }
        records
    }

    #[test]
    fn quality_aggregation_reproduces_published_rows() {
        let mut records = quality_records(CoarsePos::N, 28, 37, 6);
        records.extend(quality_records(CoarsePos::V, 7, 33, 2));
        let table = aggregate_quality(&records).unwrap();
        assert_eq!(table.columns, ["good", "post-edit", "bad"]);
        assert_eq!(table.rows[0].label, "N");
        let n: Vec<String> = table.rows[0]
            .cells
            .iter()
            .map(|c| c.unwrap().percent_text())
            .collect();
        assert_eq!(n, ["39.44", "52.11", "8.45"]);
        let v: Vec<String> = table.rows[1]
            .cells
            .iter()
            .map(|c| c.unwrap().percent_text())
            .collect();
        assert_eq!(v, ["16.67", "78.57", "4.76"]);

        // Raw counts of each row sum to the row's denominator.
        for row in &table.rows {
            let total: u64 = row.cells.iter().map(|c| c.unwrap().numerator).sum();
            assert_eq!(total, row.cells[0].unwrap().denominator);
        }
    }

    #[test]
    fn all_good_input_is_a_clean_sweep() {
        let table = aggregate_quality(&quality_records(CoarsePos::N, 4, 0, 0)).unwrap();
        let n: Vec<String> = table.rows[0]
            .cells
            .iter()
            .map(|c| c.unwrap().percent_text())
            .collect();
        assert_eq!(n, ["100.00", "0.00", "0.00"]);
    }

    #[test]
    fn duplicate_annotations_are_rejected() {
        let mut records = quality_records(CoarsePos::N, 1, 0, 0);
        records.push(records[0].clone());
        assert!(matches!(
            aggregate_quality(&records),
            Err(EvaluateError::DuplicateAnnotation { .. })
        ));
        // Same headword under a different part of speech is fine.
        let mut records = quality_records(CoarsePos::N, 1, 0, 0);
        let mut again = records[0].clone();
        again.pos = CoarsePos::V;
        records.push(again);
        assert!(aggregate_quality(&records).is_ok());
    }

    #[test]
    fn coverage_counts_explanations_with_visible_content() {
        let mut batch = Vec::new();
        for i in 0..71 {
            let lines = if i < 63 {
                vec![line("can_be", &["rare"], &["adj_modifier"])]
            } else {
                Vec::new()
            };
            batch.push(explanation(CoarsePos::N, lines));
        }
        let ratio = coverage_rate(&batch).unwrap();
        assert_eq!(ratio, Ratio::new(63, 71));
        assert_eq!(ratio.percent_text(), "88.73");

        assert!(matches!(coverage_rate(&[]), Err(EvaluateError::EmptyBatch)));

        let empty = vec![explanation(CoarsePos::N, Vec::new())];
        assert_eq!(coverage_rate(&empty).unwrap().percent_text(), "0.00");
    }
}
