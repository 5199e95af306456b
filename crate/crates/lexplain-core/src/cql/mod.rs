//! A query language for token sequences: per-token attribute tests combined
//! with boolean operators, sequence quantifiers, and numbered labels that
//! mark the headword and collocate positions of a grammatical relation.

mod ast;
mod matcher;
mod parse;

pub use ast::{Atom, Element, Expr, Quant, Query};
pub use matcher::{find_matches, CompiledQuery, Match};
pub use parse::parse_query;
