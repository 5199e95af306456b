//! Vertical-format reader: one token per line, tab-separated word/lemma/tag,
//! with XML-ish structural lines marking sentences and documents.

use std::io::BufRead;

use super::{Attr, Corpus, Lexicon};
use crate::error::CorpusError;
use crate::pos::PosMap;

/// Ingest a vertical-format stream into a [`Corpus`].
///
/// Content lines carry exactly three tab-separated fields. Lines starting
/// with `<` are structural: `<s>`/`</s>` delimit sentences, `<doc …>` and
/// `</doc>` split the implicit sentences formed by tokens outside any
/// explicit `<s>` pair, and everything else is ignored. A sentence still
/// open at end of input is closed there. Empty input is a valid empty
/// corpus.
pub fn ingest_vertical<R: BufRead>(input: R, pos_map: PosMap) -> Result<Corpus, CorpusError> {
    let mut lexicons = [Lexicon::default(), Lexicon::default(), Lexicon::default()];
    let mut cols: [Vec<u32>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut sentences: Vec<(u32, u32)> = Vec::new();
    let mut open_start: Option<u32> = None;

    let close = |open_start: &mut Option<u32>, sentences: &mut Vec<(u32, u32)>, at: u32| {
        if let Some(start) = open_start.take() {
            if at > start {
                sentences.push((start, at));
            }
        }
    };

    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('<') {
            let here = cols[0].len() as u32;
            if rest == "s>" || rest.starts_with("s ") {
                close(&mut open_start, &mut sentences, here);
                open_start = Some(here);
            } else if rest.starts_with("/s>") || rest.starts_with("doc") || rest.starts_with("/doc")
            {
                // Document boundaries close an open sentence just like
                // an explicit `</s>`: sentences never span documents.
                close(&mut open_start, &mut sentences, here);
            }
            // Any other structural line is ignored.
            continue;
        }

        let mut fields = line.split('\t');
        let word = fields.next().unwrap_or("");
        let lemma = fields.next();
        let tag = fields.next();
        let extra = fields.count();
        let (lemma, tag) = match (lemma, tag, extra) {
            (Some(l), Some(t), 0) => (l, t),
            _ => {
                let got = 1 + lemma.is_some() as usize + tag.is_some() as usize + extra;
                return Err(CorpusError::BadFieldCount { line: line_no, got });
            }
        };
        for (name, text) in [("word", word), ("lemma", lemma), ("tag", tag)] {
            if text.is_empty() {
                return Err(CorpusError::EmptyField {
                    line: line_no,
                    field: name,
                });
            }
        }

        let position = cols[0].len() as u32;
        if open_start.is_none() {
            open_start = Some(position);
        }
        for (attr, text) in [(Attr::Word, word), (Attr::Lemma, lemma), (Attr::Tag, tag)] {
            let id = lexicons[attr as usize].intern(text, position);
            cols[attr as usize].push(id);
        }
    }

    let end = cols[0].len() as u32;
    close(&mut open_start, &mut sentences, end);

    Ok(Corpus::from_parts(cols, sentences, lexicons, pos_map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn ingest(text: &str) -> Result<Corpus, CorpusError> {
        ingest_vertical(Cursor::new(text), PosMap::penn_default())
    }

    #[test]
    fn empty_input_is_an_empty_corpus() {
        let c = ingest("").unwrap();
        assert_eq!(c.token_count(), 0);
        assert_eq!(c.sentence_count(), 0);
        c.verify().unwrap();
    }

    #[test]
    fn explicit_sentence_markers() {
        let c = ingest("<s>\ndog\tdog\tNN\nbarks\tbark\tVBZ\n</s>\n").unwrap();
        assert_eq!(c.token_count(), 2);
        assert_eq!(c.sentences(), &[(0, 2)]);
        assert_eq!(c.value_count(Attr::Lemma), 2);
    }

    #[test]
    fn tokens_without_markers_form_one_implicit_sentence() {
        let c = ingest("a\ta\tDT\ndog\tdog\tNN\n").unwrap();
        assert_eq!(c.sentences(), &[(0, 2)]);
    }

    #[test]
    fn doc_boundary_splits_implicit_sentences() {
        let c = ingest("a\ta\tDT\n<doc id=\"2\">\ndog\tdog\tNN\n</doc>\ncat\tcat\tNN\n").unwrap();
        assert_eq!(c.sentences(), &[(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn trailing_open_sentence_closes_at_eof() {
        let c = ingest("<s>\ndog\tdog\tNN\n").unwrap();
        assert_eq!(c.sentences(), &[(0, 1)]);
    }

    #[test]
    fn empty_sentence_elements_are_dropped() {
        let c = ingest("<s>\n</s>\n<s>\ndog\tdog\tNN\n</s>\n").unwrap();
        assert_eq!(c.sentences(), &[(0, 1)]);
    }

    #[test]
    fn sentence_tag_with_attributes_opens_a_sentence() {
        let c = ingest("<s id=\"1\">\ndog\tdog\tNN\n</s>\n").unwrap();
        assert_eq!(c.sentences(), &[(0, 1)]);
    }

    #[test]
    fn unknown_structural_lines_are_ignored() {
        let c = ingest("<p>\ndog\tdog\tNN\n</p>\n").unwrap();
        assert_eq!(c.token_count(), 1);
        assert_eq!(c.sentences(), &[(0, 1)]);
    }

    #[test]
    fn wrong_field_count_reports_the_line() {
        let err = ingest("<s>\ndog\tdog\n</s>\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "got: {msg}");
        assert!(msg.contains("got 2"), "got: {msg}");
    }

    #[test]
    fn four_fields_are_rejected() {
        let err = ingest("dog\tdog\tNN\textra\n").unwrap_err();
        assert!(err.to_string().contains("got 4"));
    }

    #[test]
    fn empty_field_is_rejected() {
        let err = ingest("dog\t\tNN\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "got: {msg}");
        assert!(msg.contains("lemma"), "got: {msg}");
    }

    #[test]
    fn consecutive_sentence_opens_close_the_previous_one() {
        let c = ingest("<s>\ndog\tdog\tNN\n<s>\ncat\tcat\tNN\n</s>\n").unwrap();
        assert_eq!(c.sentences(), &[(0, 1), (1, 2)]);
    }
}
