//! Query AST and its canonical printer.
//!
//! The printer emits text the parser accepts back into a structurally equal
//! query (`parse ∘ print` is the identity on parsed queries), which the
//! grammar module uses to round-trip grammar files.

use std::fmt;

use crate::corpus::Attr;

/// A parsed token-sequence query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub elements: Vec<Element>,
}

/// One bracketed token pattern with optional label and quantifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    /// Numeric label binding the matched position (`1:` = headword,
    /// `2:` = collocate by convention).
    pub label: Option<u32>,
    /// `None` is the empty pattern `[]`, matching any token.
    pub test: Option<Expr>,
    pub quant: Quant,
}

/// Element quantifier. `One` is the default (no suffix).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quant {
    One,
    /// `?` — zero or one.
    Optional,
    /// `{min,max}` — between `min` and `max` consecutive tokens.
    Repeat {
        min: u32,
        max: u32,
    },
}

impl Quant {
    pub fn bounds(&self) -> (u32, u32) {
        match *self {
            Quant::One => (1, 1),
            Quant::Optional => (0, 1),
            Quant::Repeat { min, max } => (min, max),
        }
    }
}

/// Boolean expression over attribute tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Atom(Atom),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

/// `attr="regex"` — the regex is matched against the whole attribute value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub attr: Attr,
    /// Regex source text, unescaped (a `\"` in query text is a `"` here).
    pub pattern: String,
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, el) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{el}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(label) = self.label {
            write!(f, "{label}:")?;
        }
        f.write_str("[")?;
        if let Some(expr) = &self.test {
            fmt_expr(expr, f, 0)?;
        }
        f.write_str("]")?;
        match self.quant {
            Quant::One => Ok(()),
            Quant::Optional => f.write_str("?"),
            Quant::Repeat { min, max } => write!(f, "{{{min},{max}}}"),
        }
    }
}

fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Or(..) => 0,
        Expr::And(..) => 1,
        Expr::Not(..) => 2,
        Expr::Atom(..) => 3,
    }
}

/// Print with minimal parentheses: a subexpression is parenthesized only
/// when its precedence is below what its context requires. Right operands
/// require one level more than left ones so left-associated trees print
/// bare and re-parse identically.
fn fmt_expr(expr: &Expr, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
    if precedence(expr) < min_prec {
        f.write_str("(")?;
        fmt_expr(expr, f, 0)?;
        return f.write_str(")");
    }
    match expr {
        Expr::Or(a, b) => {
            fmt_expr(a, f, 0)?;
            f.write_str(" | ")?;
            fmt_expr(b, f, 1)
        }
        Expr::And(a, b) => {
            fmt_expr(a, f, 1)?;
            f.write_str(" & ")?;
            fmt_expr(b, f, 2)
        }
        Expr::Not(inner) => {
            f.write_str("!")?;
            fmt_expr(inner, f, 2)
        }
        Expr::Atom(atom) => {
            write!(f, "{}=\"", atom.attr.as_str())?;
            for ch in atom.pattern.chars() {
                if ch == '"' {
                    f.write_str("\\\"")?;
                } else {
                    write!(f, "{ch}")?;
                }
            }
            f.write_str("\"")
        }
    }
}
