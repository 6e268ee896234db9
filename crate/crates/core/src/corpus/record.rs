use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Doctype {
    Article,
    Eprint,
    Abstract,
    Book,
    Proceedings,
    Techreport,
    Pressrelease,
    Phdthesis,
    Software,
    Catalog,
    Bookreview,
    Misc,
}

impl Doctype {
    pub const ALL: [Doctype; 12] = [
        Doctype::Article,
        Doctype::Eprint,
        Doctype::Abstract,
        Doctype::Book,
        Doctype::Proceedings,
        Doctype::Techreport,
        Doctype::Pressrelease,
        Doctype::Phdthesis,
        Doctype::Software,
        Doctype::Catalog,
        Doctype::Bookreview,
        Doctype::Misc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Doctype::Article => "article",
            Doctype::Eprint => "eprint",
            Doctype::Abstract => "abstract",
            Doctype::Book => "book",
            Doctype::Proceedings => "proceedings",
            Doctype::Techreport => "techreport",
            Doctype::Pressrelease => "pressrelease",
            Doctype::Phdthesis => "phdthesis",
            Doctype::Software => "software",
            Doctype::Catalog => "catalog",
            Doctype::Bookreview => "bookreview",
            Doctype::Misc => "misc",
        }
    }

    /// Plural heading used in digests.
    pub fn heading(self) -> &'static str {
        match self {
            Doctype::Article => "Articles",
            Doctype::Eprint => "E-prints",
            Doctype::Abstract => "Abstracts",
            Doctype::Book => "Books",
            Doctype::Proceedings => "Proceedings",
            Doctype::Techreport => "Technical reports",
            Doctype::Pressrelease => "Press releases",
            Doctype::Phdthesis => "PhD theses",
            Doctype::Software => "Software",
            Doctype::Catalog => "Catalogs",
            Doctype::Bookreview => "Book reviews",
            Doctype::Misc => "Other",
        }
    }

    pub fn parse(s: &str) -> Option<Doctype> {
        let s = s.to_ascii_lowercase();
        Doctype::ALL.into_iter().find(|d| d.as_str() == s)
    }
}

impl fmt::Display for Doctype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Collection {
    Astronomy,
    Physics,
    General,
}

/// One bibliographic entry as it appears in a corpus dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibRecord {
    pub bibcode: String,
    pub title: String,
    #[serde(default)]
    pub authors: Vec<String>,
    #[serde(rename = "abstract", default)]
    pub abstract_text: String,
    #[serde(default)]
    pub body: Option<String>,
    #[serde(default)]
    pub keywords: Vec<String>,
    pub year: u16,
    pub doctype: Doctype,
    #[serde(default)]
    pub refereed: bool,
    #[serde(default)]
    pub collections: BTreeSet<Collection>,
    #[serde(default)]
    pub references: Vec<String>,
    /// Citation count reported by an external service; display only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_citations: Option<u32>,
}

impl BibRecord {
    /// Minimal record, mostly for tests and examples.
    pub fn new(bibcode: impl Into<String>, title: impl Into<String>, year: u16) -> Self {
        BibRecord {
            bibcode: bibcode.into(),
            title: title.into(),
            authors: Vec::new(),
            abstract_text: String::new(),
            body: None,
            keywords: Vec::new(),
            year,
            doctype: Doctype::Article,
            refereed: false,
            collections: BTreeSet::new(),
            references: Vec::new(),
            external_citations: None,
        }
    }

    /// Checks the per-record invariants; returns the first violation.
    pub fn check(&self) -> Result<(), String> {
        if self.bibcode.trim().is_empty() {
            return Err("empty bibcode".into());
        }
        if !(1000..=2999).contains(&self.year) {
            return Err(format!("year {} outside 1000-2999", self.year));
        }
        let mut seen = BTreeSet::new();
        for r in &self.references {
            if r == &self.bibcode {
                return Err("record references itself".into());
            }
            if !seen.insert(r) {
                return Err(format!("duplicate reference {r}"));
            }
        }
        Ok(())
    }
}
