//! ADS-style boolean query language.
//!
//! ```text
//! query  := diff
//! diff   := or ( NOT or )*            "A NOT B" is A minus B
//! or     := and ( OR and )*
//! and    := unit ( [AND] unit )*       juxtaposition is AND
//! unit   := NOT unit | '(' diff ')' | ['='] field ':' ( term | '(' diff ')' )
//!         | docs(library/KEY) | term
//! term   := "quoted phrase" | bare-word | year form (only under year:)
//! ```
//!
//! `AND`, `OR` and `NOT` are operators only in uppercase. A leading `=` on a
//! field makes every phrase inside that scope exact (no acronym expansion).
//! Binary `NOT` binds loosest, so `a OR b NOT docs(library/K)` removes the
//! library from both branches.

mod ast;
mod lexer;
mod normalize;
mod parser;
mod print;
mod validate;

pub use ast::{FieldName, QueryNode};
pub use normalize::normalize;
pub(crate) use parser::{is_library_key_char, parse_year_form};
pub use parser::{parse, ParseError};
pub use print::serialize;
pub use validate::{validate, Issue, IssueKind, Severity};
