//! Flat `key = value` configuration shared by every pipeline stage.
//!
//! The format is deliberately plain: one assignment per line, `#` comments,
//! no sections. `pos_map` is the only repeatable key; its lines are ordered
//! and replace the default tag mapping wholesale when present. Dumping a
//! config and parsing it back yields an equal value, so an "effective
//! config" can be round-tripped through a file without drift.

use std::io::BufRead;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::ConfigError;
use crate::pos::{CoarsePos, PosMap};
use crate::sketch::ScoreMode;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Collocation pairs rarer than this are dropped from sketches.
    pub min_pair_freq: u64,
    /// Items taken from each grammatical relation per explanation line.
    pub relation_top_k: usize,
    /// Items taken from the thesaurus per explanation line.
    pub thesaurus_top_k: usize,
    /// Infrequency cutoff in occurrences per million tokens.
    pub infrequency_per_million: f64,
    /// Whether sketch groups are ordered by association score or raw counts.
    pub score_mode: ScoreMode,
    /// Ordered tag-pattern → coarse POS rules.
    pub pos_map: PosMap,
    /// Schema files overriding the embedded per-POS templates.
    pub template_noun: Option<PathBuf>,
    pub template_adjective: Option<PathBuf>,
    pub template_verb: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            min_pair_freq: 2,
            relation_top_k: 3,
            thesaurus_top_k: 5,
            infrequency_per_million: crate::evaluate::DEFAULT_INFREQUENCY_PER_MILLION,
            score_mode: ScoreMode::LogDice,
            pos_map: PosMap::penn_default(),
            template_noun: None,
            template_adjective: None,
            template_verb: None,
        }
    }
}

impl Config {
    /// Render the effective configuration as a commented file.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str("# sketch extraction\n");
        out.push_str(&format!("min_pair_freq = {}\n", self.min_pair_freq));
        out.push_str(&format!(
            "score_mode = {}\n",
            score_mode_str(self.score_mode)
        ));
        out.push_str("\n# explanation composition\n");
        out.push_str(&format!("relation_top_k = {}\n", self.relation_top_k));
        out.push_str(&format!("thesaurus_top_k = {}\n", self.thesaurus_top_k));
        for (key, path) in [
            ("template_noun", &self.template_noun),
            ("template_adjective", &self.template_adjective),
            ("template_verb", &self.template_verb),
        ] {
            if let Some(path) = path {
                out.push_str(&format!("{key} = {}\n", path.display()));
            }
        }
        out.push_str("\n# evaluation\n");
        out.push_str(&format!(
            "infrequency_per_million = {}\n",
            self.infrequency_per_million
        ));
        out.push_str("\n# tag pattern -> coarse part of speech, first match wins\n");
        for (pattern, pos) in self.pos_map.rules() {
            out.push_str(&format!("pos_map = {pattern} {pos}\n"));
        }
        out
    }
}

/// Parse a configuration file. Keys not set keep their defaults; `pos_map`
/// lines, when present, replace the default mapping in file order.
pub fn parse_config<R: BufRead>(input: R) -> Result<Config, ConfigError> {
    let mut config = Config::default();
    let mut pos_rules: Vec<(String, CoarsePos)> = Vec::new();
    for (offset, line) in input.lines().enumerate() {
        let line_no = offset + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let Some((key, value)) = text.split_once('=') else {
            return Err(ConfigError::BadLine {
                line: line_no,
                text: text.to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let bad = |message: String| ConfigError::BadValue {
            line: line_no,
            key: key.to_string(),
            message,
        };
        match key {
            "min_pair_freq" => {
                config.min_pair_freq = parse_count(value).map_err(bad)?;
            }
            "relation_top_k" => {
                config.relation_top_k = parse_count(value).map_err(bad)? as usize;
            }
            "thesaurus_top_k" => {
                config.thesaurus_top_k = parse_count(value).map_err(bad)? as usize;
            }
            "infrequency_per_million" => {
                let threshold: f64 = value.parse().map_err(|e| bad(format!("{e}")))?;
                if threshold.is_nan() || threshold <= 0.0 {
                    return Err(bad("must be greater than zero".to_string()));
                }
                config.infrequency_per_million = threshold;
            }
            "score_mode" => {
                config.score_mode = match value {
                    "logdice" => ScoreMode::LogDice,
                    "rawfreq" => ScoreMode::RawFreq,
                    other => {
                        return Err(bad(format!("expected logdice or rawfreq, got {other:?}")))
                    }
                };
            }
            "pos_map" => {
                let mut parts = value.split_whitespace();
                let (Some(pattern), Some(pos), None) = (parts.next(), parts.next(), parts.next())
                else {
                    return Err(bad("expected `PATTERN POS`".to_string()));
                };
                let pos = CoarsePos::from_str(pos)?;
                pos_rules.push((pattern.to_string(), pos));
            }
            "template_noun" => config.template_noun = Some(PathBuf::from(value)),
            "template_adjective" => config.template_adjective = Some(PathBuf::from(value)),
            "template_verb" => config.template_verb = Some(PathBuf::from(value)),
            other => {
                return Err(ConfigError::UnknownKey {
                    line: line_no,
                    key: other.to_string(),
                });
            }
        }
    }
    if !pos_rules.is_empty() {
        let borrowed: Vec<(&str, CoarsePos)> = pos_rules
            .iter()
            .map(|(p, pos)| (p.as_str(), *pos))
            .collect();
        config.pos_map = PosMap::new(&borrowed)?;
    }
    Ok(config)
}

fn parse_count(value: &str) -> Result<u64, String> {
    let n: u64 = value.parse().map_err(|e| format!("{e}"))?;
    if n == 0 {
        return Err("must be at least 1".to_string());
    }
    Ok(n)
}

fn score_mode_str(mode: ScoreMode) -> &'static str {
    match mode {
        ScoreMode::LogDice => "logdice",
        ScoreMode::RawFreq => "rawfreq",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Config, ConfigError> {
        parse_config(text.as_bytes())
    }

    #[test]
    fn empty_input_is_the_default_config() {
        assert_eq!(parse("").unwrap(), Config::default());
        assert_eq!(parse("# only a comment\n\n").unwrap(), Config::default());
    }

    #[test]
    fn keys_override_defaults() {
        let config = parse(
            "min_pair_freq = 5\n\
             relation_top_k = 4\n\
             thesaurus_top_k = 7\n\
             infrequency_per_million = 2.5\n\
             score_mode = rawfreq\n\
             template_verb = custom/verb.tpl\n",
        )
        .unwrap();
        assert_eq!(config.min_pair_freq, 5);
        assert_eq!(config.relation_top_k, 4);
        assert_eq!(config.thesaurus_top_k, 7);
        assert_eq!(config.infrequency_per_million, 2.5);
        assert_eq!(config.score_mode, ScoreMode::RawFreq);
        assert_eq!(config.template_verb, Some(PathBuf::from("custom/verb.tpl")));
        assert_eq!(config.template_noun, None);
        // Untouched keys keep defaults.
        assert_eq!(config.pos_map, PosMap::penn_default());
    }

    #[test]
    fn pos_map_lines_replace_the_default_in_order() {
        let config = parse("pos_map = NOUN N\npos_map = .*ADJ J\npos_map = X other\n").unwrap();
        let rules: Vec<(String, CoarsePos)> = config
            .pos_map
            .rules()
            .map(|(p, pos)| (p.to_string(), pos))
            .collect();
        assert_eq!(
            rules,
            [
                ("NOUN".to_string(), CoarsePos::N),
                (".*ADJ".to_string(), CoarsePos::J),
                ("X".to_string(), CoarsePos::Other),
            ]
        );
        assert_eq!(config.pos_map.coarse("NOUN"), CoarsePos::N);
        assert_eq!(config.pos_map.coarse("VERB"), CoarsePos::Other);
    }

    #[test]
    fn dump_then_parse_is_identity() {
        let config = Config {
            min_pair_freq: 3,
            score_mode: ScoreMode::RawFreq,
            infrequency_per_million: 0.5,
            template_noun: Some(PathBuf::from("n.tpl")),
            ..Config::default()
        };
        let reparsed = parse(&config.dump()).unwrap();
        assert_eq!(reparsed, config);

        let default = Config::default();
        assert_eq!(parse(&default.dump()).unwrap(), default);
    }

    #[test]
    fn malformed_lines_are_rejected_with_line_numbers() {
        match parse("min_pair_freq = 2\nnot an assignment\n") {
            Err(ConfigError::BadLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected bad-line error, got {other:?}"),
        }
        match parse("no_such_key = 1\n") {
            Err(ConfigError::UnknownKey { line, key }) => {
                assert_eq!((line, key.as_str()), (1, "no_such_key"));
            }
            other => panic!("expected unknown-key error, got {other:?}"),
        }
    }

    #[test]
    fn zero_counts_and_thresholds_are_rejected() {
        assert!(matches!(
            parse("min_pair_freq = 0\n"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            parse("relation_top_k = 0\n"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            parse("infrequency_per_million = 0\n"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            parse("infrequency_per_million = -1\n"),
            Err(ConfigError::BadValue { .. })
        ));
    }

    #[test]
    fn bad_pos_map_values_are_rejected() {
        assert!(matches!(
            parse("pos_map = onlypattern\n"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            parse("pos_map = N.* Q\n"),
            Err(ConfigError::BadPos(_))
        ));
        assert!(matches!(
            parse("pos_map = ( N\n"),
            Err(ConfigError::BadRegex(..))
        ));
        assert!(matches!(
            parse("score_mode = dice\n"),
            Err(ConfigError::BadValue { .. })
        ));
    }
}
