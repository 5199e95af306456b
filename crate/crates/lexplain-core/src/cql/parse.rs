//! Recursive-descent parser for the query language.
//!
//! Accepted grammar:
//!
//! ```text
//! query   := element+
//! element := (N ":")? "[" expr? "]" quant?
//! expr    := or
//! or      := and ("|" and)*
//! and     := not ("&" not)*
//! not     := "!" not | "(" expr ")" | atom
//! atom    := attr "=" "\"" regex "\""
//! quant   := "?" | "{" m "," n "}"
//! ```
//!
//! `!` binds tighter than `&`, which binds tighter than `|`. The empty
//! pattern `[]` matches any token. Regexes are validated here and are
//! implicitly anchored to the whole attribute value when evaluated. Repeat
//! bounds are capped at 9. Labels are rejected when duplicated or attached
//! to a quantified element.

use super::ast::{Atom, Element, Expr, Quant, Query};
use crate::corpus::Attr;
use crate::error::QueryError;

pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let mut elements = Vec::new();
    while !p.at_end() {
        elements.push(p.element()?);
        p.skip_ws();
    }
    if elements.is_empty() {
        return Err(p.syntax("expected at least one [..] element"));
    }

    let mut seen = Vec::new();
    for el in &elements {
        if let Some(label) = el.label {
            if seen.contains(&label) {
                return Err(QueryError::DuplicateLabel { label });
            }
            seen.push(label);
            if el.quant != Quant::One {
                return Err(QueryError::LabelUnderQuantifier { label });
            }
        }
    }
    Ok(Query { elements })
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn syntax(&self, message: &str) -> QueryError {
        QueryError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), QueryError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(&format!("expected {:?}", byte as char)))
        }
    }

    fn number(&mut self) -> Result<u32, QueryError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax("expected a number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("digits are ASCII")
            .parse()
            .map_err(|_| QueryError::Syntax {
                offset: start,
                message: "number is too large".to_string(),
            })
    }

    fn element(&mut self) -> Result<Element, QueryError> {
        let label = if self.peek().is_some_and(|b| b.is_ascii_digit()) {
            let n = self.number()?;
            self.expect(b':')?;
            Some(n)
        } else {
            None
        };
        self.expect(b'[')?;
        self.skip_ws();
        let test = if self.peek() == Some(b']') {
            None
        } else {
            Some(self.or_expr()?)
        };
        self.skip_ws();
        self.expect(b']')?;
        let quant = self.quant()?;
        Ok(Element { label, test, quant })
    }

    fn quant(&mut self) -> Result<Quant, QueryError> {
        match self.peek() {
            Some(b'?') => {
                self.pos += 1;
                Ok(Quant::Optional)
            }
            Some(b'{') => {
                self.pos += 1;
                self.skip_ws();
                let at = self.pos;
                let min = self.number()?;
                self.skip_ws();
                self.expect(b',')?;
                self.skip_ws();
                let max = self.number()?;
                self.skip_ws();
                self.expect(b'}')?;
                if max > 9 {
                    return Err(QueryError::Syntax {
                        offset: at,
                        message: format!("repeat bound {max} exceeds the maximum of 9"),
                    });
                }
                if min > max {
                    return Err(QueryError::Syntax {
                        offset: at,
                        message: format!("repeat range {{{min},{max}}} is empty"),
                    });
                }
                Ok(Quant::Repeat { min, max })
            }
            _ => Ok(Quant::One),
        }
    }

    fn or_expr(&mut self) -> Result<Expr, QueryError> {
        let mut left = self.and_expr()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'|') {
                self.pos += 1;
                self.skip_ws();
                let right = self.and_expr()?;
                left = Expr::Or(Box::new(left), Box::new(right));
            } else {
                return Ok(left);
            }
        }
    }

    fn and_expr(&mut self) -> Result<Expr, QueryError> {
        let mut left = self.not_expr()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'&') {
                self.pos += 1;
                self.skip_ws();
                let right = self.not_expr()?;
                left = Expr::And(Box::new(left), Box::new(right));
            } else {
                return Ok(left);
            }
        }
    }

    fn not_expr(&mut self) -> Result<Expr, QueryError> {
        self.skip_ws();
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(Expr::Not(Box::new(self.not_expr()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.or_expr()?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(inner)
            }
            _ => Ok(Expr::Atom(self.atom()?)),
        }
    }

    fn atom(&mut self) -> Result<Atom, QueryError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax("expected an attribute name"));
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ASCII");
        let attr = Attr::parse(name).ok_or_else(|| QueryError::UnknownAttribute {
            name: name.to_string(),
        })?;
        self.skip_ws();
        self.expect(b'=')?;
        self.skip_ws();
        self.expect(b'"')?;
        let pattern = self.quoted()?;
        validate_pattern(&pattern)?;
        Ok(Atom { attr, pattern })
    }

    /// Scan a quoted regex. `\"` unescapes to `"`; any other `\x` pair is
    /// kept verbatim for the regex engine to interpret.
    fn quoted(&mut self) -> Result<String, QueryError> {
        // The parser only stops on ASCII delimiters, so `pos` is always a
        // char boundary of the original (valid UTF-8) input.
        let rest = std::str::from_utf8(&self.bytes[self.pos..]).expect("input is UTF-8");
        let mut out = String::new();
        let mut chars = rest.char_indices();
        while let Some((i, ch)) = chars.next() {
            match ch {
                '"' => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    None => break,
                    Some((_, '"')) => out.push('"'),
                    Some((_, esc)) => {
                        out.push('\\');
                        out.push(esc);
                    }
                },
                _ => out.push(ch),
            }
        }
        self.pos = self.bytes.len();
        Err(self.syntax("unterminated string"))
    }
}

/// Compile the anchored form once to reject bad regexes at parse time.
fn validate_pattern(pattern: &str) -> Result<(), QueryError> {
    regex::Regex::new(&format!("^(?:{pattern})$"))
        .map(|_| ())
        .map_err(|e| QueryError::BadPattern {
            pattern: pattern.to_string(),
            message: e.to_string(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_brackets_match_anything() {
        let q = parse_query("[]").unwrap();
        assert_eq!(q.elements.len(), 1);
        assert_eq!(q.elements[0].label, None);
        assert_eq!(q.elements[0].test, None);
        assert_eq!(q.elements[0].quant, Quant::One);
    }

    #[test]
    fn labels_map_elements() {
        let q = parse_query("2:[tag=\"J.*\"] 1:[tag=\"N.*\"]").unwrap();
        assert_eq!(q.elements.len(), 2);
        assert_eq!(q.elements[0].label, Some(2));
        assert_eq!(q.elements[1].label, Some(1));
    }

    #[test]
    fn boolean_precedence_not_over_and_over_or() {
        let q = parse_query("[lemma=\"a\" | lemma=\"b\" & !tag=\"c\"]").unwrap();
        let Some(Expr::Or(left, right)) = &q.elements[0].test else {
            panic!("expected | at the top");
        };
        assert!(matches!(**left, Expr::Atom(_)));
        let Expr::And(_, and_right) = &**right else {
            panic!("expected & under |");
        };
        assert!(matches!(**and_right, Expr::Not(_)));
    }

    #[test]
    fn parens_override_precedence() {
        let q = parse_query("[(lemma=\"a\" | lemma=\"b\") & tag=\"c\"]").unwrap();
        assert!(matches!(q.elements[0].test, Some(Expr::And(..))));
    }

    #[test]
    fn quantifiers_parse() {
        let q = parse_query("[]? [tag=\"R.*\"]{0,2} []").unwrap();
        assert_eq!(q.elements[0].quant, Quant::Optional);
        assert_eq!(q.elements[1].quant, Quant::Repeat { min: 0, max: 2 });
        assert_eq!(q.elements[2].quant, Quant::One);
    }

    #[test]
    fn repeat_bound_above_nine_is_rejected() {
        let err = parse_query("[]{0,10}").unwrap_err();
        assert!(err.to_string().contains("exceeds"));
    }

    #[test]
    fn inverted_repeat_range_is_rejected() {
        let err = parse_query("[]{3,2}").unwrap_err();
        assert!(err.to_string().contains("empty"));
    }

    #[test]
    fn duplicate_label_is_rejected() {
        let err = parse_query("1:[] 1:[]").unwrap_err();
        assert!(matches!(err, QueryError::DuplicateLabel { label: 1 }));
    }

    #[test]
    fn label_under_quantifier_is_rejected() {
        let err = parse_query("1:[]?").unwrap_err();
        assert!(matches!(err, QueryError::LabelUnderQuantifier { label: 1 }));
        let err = parse_query("2:[]{1,3}").unwrap_err();
        assert!(matches!(err, QueryError::LabelUnderQuantifier { label: 2 }));
    }

    #[test]
    fn unknown_attribute_is_rejected() {
        let err = parse_query("[pos=\"N\"]").unwrap_err();
        assert!(matches!(err, QueryError::UnknownAttribute { name } if name == "pos"));
    }

    #[test]
    fn bad_regex_is_rejected_at_parse_time() {
        let err = parse_query("[word=\"(\"]").unwrap_err();
        assert!(matches!(err, QueryError::BadPattern { .. }));
    }

    #[test]
    fn syntax_errors_carry_byte_offsets() {
        let err = parse_query("[word=\"a\"] [word").unwrap_err();
        let QueryError::Syntax { offset, .. } = err else {
            panic!("expected a syntax error");
        };
        assert_eq!(offset, 16);
    }

    #[test]
    fn escaped_quote_lands_in_the_pattern() {
        let q = parse_query("[word=\"\\\"\"]").unwrap();
        let Some(Expr::Atom(atom)) = &q.elements[0].test else {
            panic!();
        };
        assert_eq!(atom.pattern, "\"");
    }

    #[test]
    fn empty_query_is_rejected() {
        assert!(parse_query("").is_err());
        assert!(parse_query("   ").is_err());
    }

    #[test]
    fn print_parse_fixpoint_on_representative_queries() {
        for text in [
            "[]",
            "1:[tag=\"N.*\"] [word=\"of\"] 2:[tag=\"N.*\"]",
            "2:[tag=\"J.*\"] 1:[tag=\"N.*\"]",
            "[lemma=\"a\" | lemma=\"b\" & !tag=\"c\"]",
            "[(lemma=\"a\" | lemma=\"b\") & tag=\"c\"]",
            "[!(lemma=\"x\" | word=\"y\")]{2,5}",
            "[]? [tag=\"R.*\"]{0,2} 1:[lemma=\"have|contain\"] 2:[]",
            "[word=\"\\\"quoted\\\"\"]",
            "[!!lemma=\"x\"]",
        ] {
            let parsed = parse_query(text).unwrap();
            let printed = parsed.to_string();
            let reparsed = parse_query(&printed)
                .unwrap_or_else(|e| panic!("reparse of {printed:?} failed: {e}"));
            assert_eq!(
                parsed, reparsed,
                "round trip changed {text:?} → {printed:?}"
            );
        }
    }
}
