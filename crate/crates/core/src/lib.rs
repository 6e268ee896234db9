//! Toolkit for curating a "living bibliography".
//!
//! The crate is organised around the curation loop: a boolean query
//! ([`query`]) is evaluated against a local record dump ([`corpus`]), hits
//! are classified by a curator ([`curation`]) into named document sets
//! ([`library`]), and the resulting libraries are summarised with citation
//! statistics ([`metrics`]). [`remote`] talks to an ADS-compatible service so
//! the same libraries can be mirrored remotely.

pub mod clock;
pub mod corpus;
pub mod curation;
pub mod library;
pub mod metrics;
pub mod presets;
pub mod query;
pub mod remote;

pub use corpus::{
    build_index, evaluate, explain_match, load_corpus, tokenize, BibRecord, Corpus, Doctype, Index,
    LibraryResolver, MatchExplanation, SearchResult,
};
pub use curation::{Curation, CurationLibraries, Decision, DecisionInput, RubricTag, Verdict};
pub use library::{Catalog, Library, SetOp};
pub use metrics::{citation_table, invert_citations, year_histogram, MetricsReport, YearHistogram};
pub use query::{normalize, parse, serialize, validate, FieldName, QueryNode};
