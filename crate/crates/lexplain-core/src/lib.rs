//! Corpus-driven drafting of word-meaning explanations.
//!
//! The pipeline: ingest a vertical-format annotated corpus into an
//! immutable token store ([`corpus`]), run a grammar of labeled token-
//! sequence queries over it ([`cql`], [`grammar`]), tally and score the
//! resulting (headword, relation, collocate) triples ([`sketch`]), derive
//! distributional neighbors from shared collocation contexts
//! ([`thesaurus`]), compose the ranked material into per-part-of-speech
//! templated explanation drafts ([`explain`]), and measure batches of
//! drafts with indicator and quality reports ([`evaluate`]).

pub mod config;
pub mod corpus;
pub mod cql;
pub mod error;
pub mod evaluate;
pub mod explain;
pub mod grammar;
pub mod pos;
pub mod sketch;
pub mod thesaurus;
