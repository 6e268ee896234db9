use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::load::Corpus;
use super::record::BibRecord;
use super::tokenize::tokenize;

/// The (term, start position) pairs making up one sequence match.
pub(crate) type SequenceMatch = Vec<(String, u32)>;

/// Physical text fields that carry a positional index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextField {
    Title,
    Abstract,
    Keywords,
    Body,
    Author,
}

impl TextField {
    pub const ALL: [TextField; 5] = [
        TextField::Title,
        TextField::Abstract,
        TextField::Keywords,
        TextField::Body,
        TextField::Author,
    ];

    fn slot(self) -> usize {
        self as usize
    }

    /// The field's text values for one record. Multi-valued fields yield one
    /// entry per value; a missing body yields nothing.
    pub fn values(self, record: &BibRecord) -> Vec<&str> {
        match self {
            TextField::Title => vec![record.title.as_str()],
            TextField::Abstract => vec![record.abstract_text.as_str()],
            TextField::Keywords => record.keywords.iter().map(String::as_str).collect(),
            TextField::Body => record.body.as_deref().into_iter().collect(),
            TextField::Author => record.authors.iter().map(String::as_str).collect(),
        }
    }
}

/// Token occurrences of one field, as (start, span) pairs sorted by start.
pub(crate) type Occurrences = Vec<(u32, u32)>;

#[derive(Debug, Clone, Default)]
struct FieldIndex {
    /// term -> postings sorted by document number
    terms: HashMap<String, Vec<(u32, Occurrences)>>,
}

/// Positional inverted index over a corpus. Immutable once built.
#[derive(Debug, Clone)]
pub struct Index {
    corpus: Corpus,
    fields: [FieldIndex; 5],
}

/// Builds one positional index per physical text field. Values of
/// multi-valued fields are separated by an empty position so phrases never
/// straddle two authors or two keywords.
pub fn build_index(corpus: Corpus) -> Index {
    let mut fields: [FieldIndex; 5] = Default::default();
    for (doc, record) in corpus.records().iter().enumerate() {
        let doc = doc as u32;
        for field in TextField::ALL {
            let mut per_term: HashMap<String, Occurrences> = HashMap::new();
            let mut base = 0u32;
            for value in field.values(record) {
                let tokens = tokenize(value);
                let mut next_base = base;
                for t in tokens {
                    let start = base + t.position;
                    next_base = next_base.max(start + t.span);
                    per_term.entry(t.text).or_default().push((start, t.span));
                }
                base = next_base + 1;
            }
            let index = &mut fields[field.slot()];
            for (term, mut occ) in per_term {
                occ.sort_unstable();
                index.terms.entry(term).or_default().push((doc, occ));
            }
        }
    }
    Index { corpus, fields }
}

impl Index {
    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn len(&self) -> usize {
        self.corpus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corpus.is_empty()
    }

    pub(crate) fn postings(&self, field: TextField, term: &str) -> &[(u32, Occurrences)] {
        self.fields[field.slot()]
            .terms
            .get(term)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    fn occurrences(&self, field: TextField, term: &str, doc: u32) -> Option<&Occurrences> {
        let postings = self.postings(field, term);
        postings
            .binary_search_by_key(&doc, |(d, _)| *d)
            .ok()
            .map(|i| &postings[i].1)
    }

    /// Every occurrence of the token sequence `seq` in `field`, per document,
    /// as the list of (term, start) pairs making up each match.
    pub(crate) fn sequence_matches(
        &self,
        field: TextField,
        seq: &[String],
    ) -> Vec<(u32, Vec<SequenceMatch>)> {
        let Some(first) = seq.first() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (doc, first_occ) in self.postings(field, first) {
            let rest: Option<Vec<&Occurrences>> = seq[1..]
                .iter()
                .map(|t| self.occurrences(field, t, *doc))
                .collect();
            let Some(rest) = rest else { continue };
            let mut found = Vec::new();
            for &(start, span) in first_occ {
                let mut chain = vec![(first.clone(), start)];
                let mut end = start + span;
                let mut ok = true;
                for (term, occ) in seq[1..].iter().zip(&rest) {
                    match occ.iter().find(|(s, _)| *s == end) {
                        Some(&(s, sp)) => {
                            chain.push((term.clone(), s));
                            end = s + sp;
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    found.push(chain);
                }
            }
            if !found.is_empty() {
                out.push((*doc, found));
            }
        }
        out
    }
}
