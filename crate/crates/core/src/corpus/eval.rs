use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::acronym::acronyms;
use super::index::{Index, TextField};
use super::record::Doctype;
use super::tokenize::{joined_parts, parts};
use crate::query::{normalize, FieldName, QueryNode};

/// Supplies library membership for `docs(library/KEY)` and `bibgroup:NAME`.
pub trait LibraryResolver {
    fn library_members(&self, key: &str) -> Option<&BTreeSet<String>>;

    fn bibgroup_members(&self, _name: &str) -> Option<&BTreeSet<String>> {
        None
    }
}

/// Resolver with no libraries; any `docs(...)` reference fails.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoLibraries;

impl LibraryResolver for NoLibraries {
    fn library_members(&self, _key: &str) -> Option<&BTreeSet<String>> {
        None
    }
}

impl LibraryResolver for BTreeMap<String, BTreeSet<String>> {
    fn library_members(&self, key: &str) -> Option<&BTreeSet<String>> {
        self.get(key)
    }
}

impl LibraryResolver for HashMap<String, BTreeSet<String>> {
    fn library_members(&self, key: &str) -> Option<&BTreeSet<String>> {
        self.get(key)
    }
}

impl<T: LibraryResolver + ?Sized> LibraryResolver for &T {
    fn library_members(&self, key: &str) -> Option<&BTreeSet<String>> {
        (**self).library_members(key)
    }

    fn bibgroup_members(&self, name: &str) -> Option<&BTreeSet<String>> {
        (**self).bibgroup_members(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown library key {0}")]
    UnknownLibraryKey(String),
    #[error("{0} is not a hit for this query")]
    NotAHit(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchField {
    Title,
    Abstract,
    Keywords,
    Body,
    Author,
    Year,
    Doctype,
    Bibgroup,
}

impl MatchField {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchField::Title => "title",
            MatchField::Abstract => "abstract",
            MatchField::Keywords => "keywords",
            MatchField::Body => "body",
            MatchField::Author => "author",
            MatchField::Year => "year",
            MatchField::Doctype => "doctype",
            MatchField::Bibgroup => "bibgroup",
        }
    }
}

impl From<TextField> for MatchField {
    fn from(f: TextField) -> Self {
        match f {
            TextField::Title => MatchField::Title,
            TextField::Abstract => MatchField::Abstract,
            TextField::Keywords => MatchField::Keywords,
            TextField::Body => MatchField::Body,
            TextField::Author => MatchField::Author,
        }
    }
}

/// One token occurrence that made a positive leaf true.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatchExplanation {
    pub field: MatchField,
    pub term: String,
    pub position: u32,
    /// Set for acronym hits: `expanded-from: <phrase>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Sorted by year descending, then bibcode descending.
    pub hits: Vec<String>,
    pub total: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanations: Option<BTreeMap<String, Vec<MatchExplanation>>>,
}

/// Physical fields searched by a text scope.
pub fn text_fields(field: FieldName) -> &'static [TextField] {
    use TextField::*;
    match field {
        FieldName::Abs => &[Title, Abstract, Keywords],
        FieldName::Body => &[Body],
        FieldName::Title => &[Title],
        FieldName::Author => &[Author],
        FieldName::Keyword => &[Keywords],
        FieldName::Full => &[Title, Abstract, Keywords, Body],
        FieldName::Bibgroup | FieldName::Doctype | FieldName::Year => &[],
    }
}

type LeafHits = BTreeMap<u32, Vec<MatchExplanation>>;

struct Evaluator<'a, R: ?Sized> {
    index: &'a Index,
    resolver: &'a R,
}

impl<'a, R: LibraryResolver + ?Sized> Evaluator<'a, R> {
    fn empty(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.index.len())
    }

    fn members_to_set(&self, members: &BTreeSet<String>) -> FixedBitSet {
        let mut set = self.empty();
        let corpus = self.index.corpus();
        for b in members {
            if let Some(i) = corpus.position(b) {
                set.insert(i);
            }
        }
        set
    }

    fn eval(&self, node: &QueryNode) -> Result<FixedBitSet, EvalError> {
        Ok(match node {
            QueryNode::And { children } => {
                let mut acc: Option<FixedBitSet> = None;
                for c in children {
                    let s = self.eval(c)?;
                    acc = Some(match acc {
                        None => s,
                        Some(mut a) => {
                            a.intersect_with(&s);
                            a
                        }
                    });
                }
                acc.unwrap_or_else(|| self.empty())
            }
            QueryNode::Or { children } => {
                let mut acc = self.empty();
                for c in children {
                    acc.union_with(&self.eval(c)?);
                }
                acc
            }
            QueryNode::Not { child } => {
                let mut s = self.eval(child)?;
                s.toggle_range(..);
                s
            }
            QueryNode::DocsRef { key } => {
                let members = self
                    .resolver
                    .library_members(key)
                    .ok_or_else(|| EvalError::UnknownLibraryKey(key.clone()))?;
                self.members_to_set(members)
            }
            QueryNode::FieldScope { field, child } => {
                let mut set = self.empty();
                for doc in self.leaf(*field, child).keys() {
                    set.insert(*doc as usize);
                }
                set
            }
            // normalize() scopes every leaf
            leaf => {
                let mut set = self.empty();
                for doc in self.leaf(FieldName::Full, leaf).keys() {
                    set.insert(*doc as usize);
                }
                set
            }
        })
    }

    fn leaf(&self, field: FieldName, leaf: &QueryNode) -> LeafHits {
        let mut hits = LeafHits::new();
        match (field, leaf) {
            (FieldName::Year, _) => {
                let range = match leaf {
                    QueryNode::YearRange { first, last } => Some((*first, *last)),
                    QueryNode::Word { text } | QueryNode::Phrase { text, .. } => {
                        crate::query::parse_year_form(text)
                    }
                    _ => None,
                };
                if let Some((first, last)) = range {
                    for (i, r) in self.index.corpus().records().iter().enumerate() {
                        if (first..=last).contains(&r.year) {
                            hits.entry(i as u32).or_default().push(MatchExplanation {
                                field: MatchField::Year,
                                term: r.year.to_string(),
                                position: 0,
                                note: None,
                            });
                        }
                    }
                }
            }
            (FieldName::Doctype, QueryNode::Word { text } | QueryNode::Phrase { text, .. }) => {
                if let Some(dt) = Doctype::parse(text.trim()) {
                    for (i, r) in self.index.corpus().records().iter().enumerate() {
                        if r.doctype == dt {
                            hits.entry(i as u32).or_default().push(MatchExplanation {
                                field: MatchField::Doctype,
                                term: dt.as_str().to_string(),
                                position: 0,
                                note: None,
                            });
                        }
                    }
                }
            }
            (FieldName::Bibgroup, QueryNode::Word { text } | QueryNode::Phrase { text, .. }) => {
                if let Some(members) = self.resolver.bibgroup_members(text.trim()) {
                    let corpus = self.index.corpus();
                    for b in members {
                        if let Some(i) = corpus.position(b) {
                            hits.entry(i as u32).or_default().push(MatchExplanation {
                                field: MatchField::Bibgroup,
                                term: text.trim().to_string(),
                                position: 0,
                                note: None,
                            });
                        }
                    }
                }
            }
            (_, QueryNode::Phrase { text, exact }) => {
                self.text_leaf(field, text, !exact, &mut hits);
            }
            (_, QueryNode::Word { text }) => {
                self.text_leaf(field, text, false, &mut hits);
            }
            // a year range under a text field filters on year all the same
            (_, QueryNode::YearRange { .. }) => return self.leaf(FieldName::Year, leaf),
            _ => {}
        }
        hits
    }

    fn text_leaf(&self, field: FieldName, text: &str, expand: bool, hits: &mut LeafHits) {
        let split = parts(text);
        if split.is_empty() {
            return;
        }
        let joined = joined_parts(text);
        let mut sequences = vec![(split.clone(), None)];
        if joined != split {
            sequences.push((joined, None));
        }
        if expand {
            let note = format!("expanded-from: {text}");
            for a in acronyms(&split) {
                sequences.push((vec![a], Some(note.clone())));
            }
        }
        for &tf in text_fields(field) {
            for (seq, note) in &sequences {
                for (doc, chains) in self.index.sequence_matches(tf, seq) {
                    let entry = hits.entry(doc).or_default();
                    for chain in chains {
                        for (term, position) in chain {
                            let m = MatchExplanation {
                                field: tf.into(),
                                term,
                                position,
                                note: note.clone(),
                            };
                            if !entry.contains(&m) {
                                entry.push(m);
                            }
                        }
                    }
                }
            }
        }
    }

    fn explain(
        &self,
        node: &QueryNode,
        doc: u32,
        out: &mut Vec<MatchExplanation>,
    ) -> Result<(), EvalError> {
        match node {
            QueryNode::And { children } => {
                for c in children {
                    self.explain(c, doc, out)?;
                }
            }
            QueryNode::Or { children } => {
                for c in children {
                    if self.eval(c)?.contains(doc as usize) {
                        self.explain(c, doc, out)?;
                    }
                }
            }
            QueryNode::FieldScope { field, child } => {
                if let Some(ms) = self.leaf(*field, child).remove(&doc) {
                    out.extend(ms);
                }
            }
            QueryNode::Not { .. } | QueryNode::DocsRef { .. } => {}
            leaf => {
                if let Some(ms) = self.leaf(FieldName::Full, leaf).remove(&doc) {
                    out.extend(ms);
                }
            }
        }
        Ok(())
    }

    fn sorted_hits(&self, set: &FixedBitSet) -> Vec<(u32, String)> {
        let records = self.index.corpus().records();
        let mut hits: Vec<(u32, String)> = set
            .ones()
            .map(|i| (i as u32, records[i].bibcode.clone()))
            .collect();
        hits.sort_by(|(a, ab), (b, bb)| {
            let (ya, yb) = (records[*a as usize].year, records[*b as usize].year);
            yb.cmp(&ya).then_with(|| bb.cmp(ab))
        });
        hits
    }
}

fn run<R: LibraryResolver + ?Sized>(
    query: &QueryNode,
    index: &Index,
    resolver: &R,
    explain: bool,
) -> Result<SearchResult, EvalError> {
    let query = normalize(query);
    let ev = Evaluator { index, resolver };
    let set = ev.eval(&query)?;
    let hits = ev.sorted_hits(&set);
    let explanations = if explain {
        let mut map = BTreeMap::new();
        for (doc, bibcode) in &hits {
            let mut out = Vec::new();
            ev.explain(&query, *doc, &mut out)?;
            out.sort();
            out.dedup();
            map.insert(bibcode.clone(), out);
        }
        Some(map)
    } else {
        None
    };
    let hits: Vec<String> = hits.into_iter().map(|(_, b)| b).collect();
    Ok(SearchResult {
        total: hits.len(),
        hits,
        explanations,
    })
}

/// Evaluates `query` with pure set semantics over the indexed corpus.
pub fn evaluate<R: LibraryResolver + ?Sized>(
    query: &QueryNode,
    index: &Index,
    resolver: &R,
) -> Result<SearchResult, EvalError> {
    run(query, index, resolver, false)
}

/// Like [`evaluate`], with per-hit match explanations filled in.
pub fn evaluate_explained<R: LibraryResolver + ?Sized>(
    query: &QueryNode,
    index: &Index,
    resolver: &R,
) -> Result<SearchResult, EvalError> {
    run(query, index, resolver, true)
}

/// Token occurrences that made `bibcode` a hit for `query`.
pub fn explain_match<R: LibraryResolver + ?Sized>(
    bibcode: &str,
    query: &QueryNode,
    index: &Index,
    resolver: &R,
) -> Result<Vec<MatchExplanation>, EvalError> {
    let query = normalize(query);
    let ev = Evaluator { index, resolver };
    let doc = index
        .corpus()
        .position(bibcode)
        .ok_or_else(|| EvalError::NotAHit(bibcode.to_string()))?;
    if !ev.eval(&query)?.contains(doc) {
        return Err(EvalError::NotAHit(bibcode.to_string()));
    }
    let mut out = Vec::new();
    ev.explain(&query, doc as u32, &mut out)?;
    out.sort();
    out.dedup();
    Ok(out)
}
