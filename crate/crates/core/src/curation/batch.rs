//! Batch decision files: one decision per line,
//! `bibcode<TAB>verdict<TAB>tags<TAB>note`, tags comma-separated. The tags
//! and note columns may be omitted; blank lines and `#` comments are skipped.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use super::decision::DecisionInput;
use super::rubric::RubricTag;
use super::{CurationError, DecisionSource};
use crate::corpus::BibRecord;

pub fn parse_batch(text: &str) -> Result<Vec<DecisionInput>, CurationError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let err = |reason: String| CurationError::Batch {
            line: i + 1,
            reason,
        };
        let mut cols = line.splitn(4, '\t');
        let bibcode = cols.next().unwrap_or("").trim();
        let verdict = cols
            .next()
            .ok_or_else(|| err("missing verdict column".into()))?
            .parse()
            .map_err(err)?;
        let reasons = cols
            .next()
            .unwrap_or("")
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<BTreeSet<RubricTag>, _>>()
            .map_err(err)?;
        let input = DecisionInput {
            bibcode: bibcode.to_string(),
            verdict,
            reasons,
            note: cols.next().unwrap_or("").trim().to_string(),
        };
        input.check().map_err(|e| err(e.to_string()))?;
        out.push(input);
    }
    Ok(out)
}

pub fn format_batch_line(d: &DecisionInput) -> String {
    let tags: Vec<&str> = d.reasons.iter().map(|t| t.as_str()).collect();
    let note = d.note.replace(['\t', '\n', '\r'], " ");
    format!("{}\t{}\t{}\t{}", d.bibcode, d.verdict, tags.join(","), note)
}

/// Decisions looked up by bibcode; later lines win.
#[derive(Debug, Clone, Default)]
pub struct BatchDecisions {
    by_bibcode: HashMap<String, DecisionInput>,
}

impl BatchDecisions {
    pub fn new(inputs: impl IntoIterator<Item = DecisionInput>) -> Self {
        BatchDecisions {
            by_bibcode: inputs.into_iter().map(|d| (d.bibcode.clone(), d)).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CurationError> {
        Ok(BatchDecisions::new(parse_batch(text)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CurationError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CurationError::Io(format!("{}: {e}", path.display())))?;
        BatchDecisions::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.by_bibcode.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_bibcode.is_empty()
    }
}

impl DecisionSource for BatchDecisions {
    fn decide(&mut self, record: &BibRecord) -> Option<DecisionInput> {
        self.by_bibcode.get(&record.bibcode).cloned()
    }
}
