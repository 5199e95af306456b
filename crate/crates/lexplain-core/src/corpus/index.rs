//! Binary on-disk index for an ingested corpus.
//!
//! Little-endian throughout. Layout (see `docs/index_format.md` for the
//! byte-level description):
//!
//! ```text
//! "LXPC"  magic
//! u8      format version (1)
//! u32     token count
//! u32     sentence count, then per sentence: u32 start, u32 end
//! u32     pos-map rule count, then per rule: string pattern, u8 coarse code
//! 3 ×     attribute block (word, lemma, tag):
//!           u32 value count, then per value:
//!             string value, u32 freq, freq × u32 ascending positions
//! ```
//!
//! Strings are a u32 byte length followed by UTF-8 bytes. Token columns are
//! not stored: they are reconstructed from the postings on load, which
//! doubles as a coverage check (every position must be assigned exactly
//! once per attribute).

use std::collections::HashMap;
use std::io::{Read, Write};

use super::{Corpus, Lexicon, ATTRS};
use crate::error::CorpusError;
use crate::pos::{CoarsePos, PosMap};

const MAGIC: &[u8; 4] = b"LXPC";
const VERSION: u8 = 1;
/// Sanity cap on serialized string lengths (1 MiB) to fail fast on garbage.
const MAX_STR: u32 = 1 << 20;

impl Corpus {
    /// Serialize the corpus to the binary index format.
    pub fn write_index<W: Write>(&self, out: &mut W) -> Result<(), CorpusError> {
        out.write_all(MAGIC)?;
        out.write_all(&[VERSION])?;
        write_u32(out, self.token_count() as u32)?;

        write_u32(out, self.sentences.len() as u32)?;
        for &(start, end) in &self.sentences {
            write_u32(out, start)?;
            write_u32(out, end)?;
        }

        let rules: Vec<_> = self.pos_map.rules().collect();
        write_u32(out, rules.len() as u32)?;
        for (pattern, pos) in rules {
            write_str(out, pattern)?;
            out.write_all(&[pos.code()])?;
        }

        for attr in ATTRS {
            let lex = &self.lexicons[attr as usize];
            write_u32(out, lex.len() as u32)?;
            for id in 0..lex.len() {
                write_str(out, &lex.values[id])?;
                let postings = &lex.postings[id];
                write_u32(out, postings.len() as u32)?;
                for &p in postings {
                    write_u32(out, p)?;
                }
            }
        }
        Ok(())
    }

    /// Load a corpus from the binary index format, verifying its invariants.
    pub fn read_index<R: Read>(input: &mut R) -> Result<Corpus, CorpusError> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(CorpusError::BadIndex("bad magic bytes".into()));
        }
        let mut version = [0u8; 1];
        input.read_exact(&mut version)?;
        if version[0] != VERSION {
            return Err(CorpusError::BadVersion(version[0]));
        }

        let token_count = read_u32(input)? as usize;

        let sentence_count = read_u32(input)? as usize;
        let mut sentences = Vec::with_capacity(sentence_count.min(1 << 20));
        for _ in 0..sentence_count {
            let start = read_u32(input)?;
            let end = read_u32(input)?;
            sentences.push((start, end));
        }

        let rule_count = read_u32(input)? as usize;
        let mut rules = Vec::with_capacity(rule_count.min(1 << 10));
        for _ in 0..rule_count {
            let pattern = read_str(input)?;
            let mut code = [0u8; 1];
            input.read_exact(&mut code)?;
            let pos = CoarsePos::from_code(code[0])
                .ok_or_else(|| CorpusError::BadIndex(format!("bad POS code {}", code[0])))?;
            rules.push((pattern, pos));
        }
        let rule_refs: Vec<(&str, CoarsePos)> =
            rules.iter().map(|(p, c)| (p.as_str(), *c)).collect();
        let pos_map = PosMap::new(&rule_refs)
            .map_err(|e| CorpusError::BadIndex(format!("bad pos map: {e}")))?;

        let mut lexicons = [Lexicon::default(), Lexicon::default(), Lexicon::default()];
        let mut cols: [Vec<u32>; 3] = [
            vec![u32::MAX; token_count],
            vec![u32::MAX; token_count],
            vec![u32::MAX; token_count],
        ];
        for attr in ATTRS {
            let value_count = read_u32(input)? as usize;
            let mut values = Vec::with_capacity(value_count.min(1 << 20));
            let mut ids = HashMap::with_capacity(value_count.min(1 << 20));
            let mut postings = Vec::with_capacity(value_count.min(1 << 20));
            for id in 0..value_count {
                let value = read_str(input)?;
                if ids.insert(value.clone(), id as u32).is_some() {
                    return Err(CorpusError::BadIndex(format!(
                        "duplicate {} value {value:?}",
                        attr.as_str()
                    )));
                }
                values.push(value);
                let freq = read_u32(input)? as usize;
                let mut positions = Vec::with_capacity(freq.min(token_count + 1));
                let mut last: Option<u32> = None;
                for _ in 0..freq {
                    let p = read_u32(input)?;
                    if p as usize >= token_count || last.is_some_and(|l| p <= l) {
                        return Err(CorpusError::BadIndex(format!(
                            "bad posting {p} for {} id {id}",
                            attr.as_str()
                        )));
                    }
                    let cell = &mut cols[attr as usize][p as usize];
                    if *cell != u32::MAX {
                        return Err(CorpusError::BadIndex(format!(
                            "position {p} assigned twice in {} postings",
                            attr.as_str()
                        )));
                    }
                    *cell = id as u32;
                    last = Some(p);
                    positions.push(p);
                }
                postings.push(positions);
            }
            lexicons[attr as usize] = Lexicon {
                values,
                ids,
                postings,
            };
        }
        for attr in ATTRS {
            if cols[attr as usize].contains(&u32::MAX) {
                return Err(CorpusError::BadIndex(format!(
                    "{} postings do not cover every position",
                    attr.as_str()
                )));
            }
        }

        let corpus = Corpus::from_parts(cols, sentences, lexicons, pos_map);
        corpus.verify().map_err(CorpusError::BadIndex)?;
        Ok(corpus)
    }
}

fn write_u32<W: Write>(out: &mut W, v: u32) -> std::io::Result<()> {
    out.write_all(&v.to_le_bytes())
}

fn write_str<W: Write>(out: &mut W, s: &str) -> std::io::Result<()> {
    write_u32(out, s.len() as u32)?;
    out.write_all(s.as_bytes())
}

fn read_u32<R: Read>(input: &mut R) -> std::io::Result<u32> {
    let mut buf = [0u8; 4];
    input.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_str<R: Read>(input: &mut R) -> Result<String, CorpusError> {
    let len = read_u32(input)?;
    if len > MAX_STR {
        return Err(CorpusError::BadIndex(format!(
            "string length {len} exceeds the sanity cap"
        )));
    }
    let mut buf = vec![0u8; len as usize];
    input.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| CorpusError::BadIndex("string is not UTF-8".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ingest_vertical;
    use std::io::Cursor;

    fn sample() -> Corpus {
        let text = "<s>\nBig\tbig\tJJ\ndogs\tdog\tNNS\nbark\tbark\tVBP\n</s>\n\
                    <s>\nthe\tthe\tDT\ndog\tdog\tNN\n</s>\n";
        ingest_vertical(Cursor::new(text), PosMap::penn_default()).unwrap()
    }

    fn round_trip(c: &Corpus) -> Corpus {
        let mut buf = Vec::new();
        c.write_index(&mut buf).unwrap();
        Corpus::read_index(&mut Cursor::new(buf)).unwrap()
    }

    #[test]
    fn round_trip_preserves_every_token() {
        let a = sample();
        let b = round_trip(&a);
        assert_eq!(a.token_count(), b.token_count());
        assert_eq!(a.sentences(), b.sentences());
        for p in 0..a.token_count() as u32 {
            for attr in ATTRS {
                assert_eq!(a.token_value(attr, p), b.token_value(attr, p));
            }
        }
        b.verify().unwrap();
    }

    #[test]
    fn round_trip_preserves_pos_map() {
        let b = round_trip(&sample());
        assert_eq!(b.coarse_pos("NNS"), CoarsePos::N);
        assert_eq!(b.coarse_pos("XY"), CoarsePos::Other);
    }

    #[test]
    fn empty_corpus_round_trips() {
        let empty = ingest_vertical(Cursor::new(""), PosMap::penn_default()).unwrap();
        let back = round_trip(&empty);
        assert_eq!(back.token_count(), 0);
        assert_eq!(back.sentence_count(), 0);
    }

    #[test]
    fn bad_magic_is_rejected() {
        let err = Corpus::read_index(&mut Cursor::new(b"XXXX\x01".to_vec())).unwrap_err();
        assert!(err.to_string().contains("magic"));
    }

    #[test]
    fn unsupported_version_is_rejected() {
        let mut buf = Vec::new();
        sample().write_index(&mut buf).unwrap();
        buf[4] = 9;
        let err = Corpus::read_index(&mut Cursor::new(buf)).unwrap_err();
        assert!(err.to_string().contains("version 9"));
    }

    #[test]
    fn truncated_file_is_rejected() {
        let mut buf = Vec::new();
        sample().write_index(&mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(Corpus::read_index(&mut Cursor::new(buf)).is_err());
    }

    #[test]
    fn corrupted_posting_is_rejected() {
        let mut buf = Vec::new();
        sample().write_index(&mut buf).unwrap();
        // Flip the final position byte to duplicate an assignment.
        let n = buf.len();
        buf[n - 4] ^= 0x01;
        assert!(Corpus::read_index(&mut Cursor::new(buf)).is_err());
    }
}
