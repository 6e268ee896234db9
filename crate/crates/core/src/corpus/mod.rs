//! Record dumps, the positional index and query evaluation.
//!
//! Matching rules: tokens are lowercase alphanumeric runs with no stemming,
//! so `technosignature` never matches `technosignatures`. A non-exact phrase
//! of two or more parts also matches its acronym as a single token. `abs:`
//! covers title, abstract and keywords; `body:` covers full text only, and
//! records without full text never match it.

mod acronym;
mod eval;
mod index;
mod load;
mod record;
mod tokenize;

pub use acronym::{acronyms, COMBINING_PREFIXES};
pub use eval::{
    evaluate, evaluate_explained, explain_match, text_fields, EvalError, LibraryResolver,
    MatchExplanation, MatchField, NoLibraries, SearchResult,
};
pub use index::{build_index, Index, TextField};
pub use load::{load_corpus, load_corpus_file, Corpus, CorpusError, RECORD_KEYS};
pub use record::{BibRecord, Collection, Doctype};
pub use tokenize::{joined_parts, parts, tokenize, Token};
