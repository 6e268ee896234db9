use std::fmt::Write;

use serde::Serialize;

use crate::corpus::{Corpus, Doctype};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigestEntry {
    pub bibcode: String,
    /// `None` when the record is not in the corpus.
    pub title: Option<String>,
    pub authors: Vec<String>,
    pub year: Option<u16>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigestSection {
    pub doctype: Doctype,
    pub heading: String,
    pub entries: Vec<DigestEntry>,
}

/// A month's Relevant decisions grouped by doctype, newest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Digest {
    pub month: String,
    pub sections: Vec<DigestSection>,
    pub warnings: Vec<String>,
}

const MAX_LISTED_AUTHORS: usize = 3;

impl Digest {
    pub fn build(month: &str, bibcodes: &[String], corpus: &Corpus) -> Digest {
        let mut sections: Vec<DigestSection> = Doctype::ALL
            .into_iter()
            .map(|d| DigestSection {
                doctype: d,
                heading: d.heading().to_string(),
                entries: Vec::new(),
            })
            .collect();
        for b in bibcodes {
            let (doctype, entry) = match corpus.get(b) {
                Some(r) => (
                    r.doctype,
                    DigestEntry {
                        bibcode: b.clone(),
                        title: Some(r.title.clone()),
                        authors: r.authors.clone(),
                        year: Some(r.year),
                    },
                ),
                None => (
                    Doctype::Misc,
                    DigestEntry {
                        bibcode: b.clone(),
                        title: None,
                        authors: Vec::new(),
                        year: None,
                    },
                ),
            };
            let section = sections
                .iter_mut()
                .find(|s| s.doctype == doctype)
                .expect("all doctypes");
            section.entries.push(entry);
        }
        sections.retain(|s| !s.entries.is_empty());
        for s in &mut sections {
            s.entries
                .sort_by(|a, b| (b.year, &b.bibcode).cmp(&(a.year, &a.bibcode)));
        }
        let warnings = if bibcodes.is_empty() {
            vec![format!("no relevant decisions for {month}")]
        } else {
            Vec::new()
        };
        Digest {
            month: month.to_string(),
            sections,
            warnings,
        }
    }

    pub fn len(&self) -> usize {
        self.sections.iter().map(|s| s.entries.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# New publications: {}\n", self.month).unwrap();
        match self.len() {
            0 => out.push_str("No entries.\n"),
            1 => out.push_str("1 entry.\n"),
            n => writeln!(out, "{n} entries.").unwrap(),
        }
        for s in &self.sections {
            writeln!(out, "\n## {}\n", s.heading).unwrap();
            for e in &s.entries {
                let title = e.title.as_deref().unwrap_or("(record not in corpus)");
                let year = e.year.map_or_else(|| "n.d.".to_string(), |y| y.to_string());
                let mut authors = e
                    .authors
                    .iter()
                    .take(MAX_LISTED_AUTHORS)
                    .cloned()
                    .collect::<Vec<_>>()
                    .join("; ");
                if e.authors.len() > MAX_LISTED_AUTHORS {
                    authors.push_str(" et al.");
                }
                if authors.is_empty() {
                    writeln!(out, "- **{title}** ({year}). `{}`", e.bibcode).unwrap();
                } else {
                    writeln!(out, "- **{title}** ({year}). {authors}. `{}`", e.bibcode).unwrap();
                }
            }
        }
        out
    }
}
