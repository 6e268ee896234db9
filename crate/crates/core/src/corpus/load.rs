use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

use super::record::BibRecord;

pub const RECORD_KEYS: [&str; 12] = [
    "bibcode",
    "title",
    "authors",
    "abstract",
    "body",
    "keywords",
    "year",
    "doctype",
    "refereed",
    "collections",
    "references",
    "external_citations",
];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("duplicate bibcode {0}")]
    DuplicateBibcode(String),
    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("reading corpus: {0}")]
    Io(#[from] std::io::Error),
}

/// An immutable, loaded set of records addressable by bibcode.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    records: Vec<BibRecord>,
    by_bibcode: HashMap<String, usize>,
    warnings: Vec<String>,
}

impl Corpus {
    pub fn from_records(records: Vec<BibRecord>) -> Result<Corpus, CorpusError> {
        let mut by_bibcode = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            r.check().map_err(|reason| CorpusError::MalformedRecord {
                line: i + 1,
                reason,
            })?;
            if by_bibcode.insert(r.bibcode.clone(), i).is_some() {
                return Err(CorpusError::DuplicateBibcode(r.bibcode.clone()));
            }
        }
        Ok(Corpus {
            records,
            by_bibcode,
            warnings: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[BibRecord] {
        &self.records
    }

    pub fn get(&self, bibcode: &str) -> Option<&BibRecord> {
        self.by_bibcode.get(bibcode).map(|&i| &self.records[i])
    }

    pub(crate) fn position(&self, bibcode: &str) -> Option<usize> {
        self.by_bibcode.get(bibcode).copied()
    }

    pub fn contains(&self, bibcode: &str) -> bool {
        self.by_bibcode.contains_key(bibcode)
    }

    /// Non-fatal problems found while loading (unknown keys).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

/// Reads line-delimited JSON records. Blank lines are skipped; unknown keys
/// are reported as warnings.
pub fn load_corpus<R: BufRead>(source: R) -> Result<Corpus, CorpusError> {
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let mut lines_of = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| CorpusError::MalformedRecord {
                line: lineno,
                reason: e.to_string(),
            })?;
        let Some(obj) = value.as_object() else {
            return Err(CorpusError::MalformedRecord {
                line: lineno,
                reason: "record is not an object".into(),
            });
        };
        for key in obj.keys() {
            if !RECORD_KEYS.contains(&key.as_str()) {
                let msg = format!("line {lineno}: ignoring unknown key `{key}`");
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
        let record: BibRecord =
            serde_json::from_value(value).map_err(|e| CorpusError::MalformedRecord {
                line: lineno,
                reason: e.to_string(),
            })?;
        record
            .check()
            .map_err(|reason| CorpusError::MalformedRecord {
                line: lineno,
                reason,
            })?;
        records.push(record);
        lines_of.push(lineno);
    }
    let mut by_bibcode = HashMap::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        if by_bibcode.insert(r.bibcode.clone(), i).is_some() {
            return Err(CorpusError::DuplicateBibcode(r.bibcode.clone()));
        }
    }
    Ok(Corpus {
        records,
        by_bibcode,
        warnings,
    })
}

pub fn load_corpus_file(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let file = File::open(path)?;
    load_corpus(BufReader::new(file))
}
