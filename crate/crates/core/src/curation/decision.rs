use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::rubric::{RubricTag, Verdict};
use super::CurationError;

/// A verdict as supplied by a curator, batch file or oracle, before it is
/// stamped with curator and time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionInput {
    pub bibcode: String,
    pub verdict: Verdict,
    #[serde(default)]
    pub reasons: BTreeSet<RubricTag>,
    #[serde(default)]
    pub note: String,
}

impl DecisionInput {
    pub fn new(bibcode: impl Into<String>, verdict: Verdict) -> Self {
        DecisionInput {
            bibcode: bibcode.into(),
            verdict,
            reasons: BTreeSet::new(),
            note: String::new(),
        }
    }

    pub fn tag(mut self, tag: RubricTag) -> Self {
        self.reasons.insert(tag);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Relevant and Skipped carry no exclusion tags; Irrelevant needs an
    /// exclusion tag or a note.
    pub fn check(&self) -> Result<(), CurationError> {
        let invalid = |reason: &str| {
            Err(CurationError::InvalidDecision {
                bibcode: self.bibcode.clone(),
                reason: reason.to_string(),
            })
        };
        if self.bibcode.trim().is_empty() {
            return invalid("empty bibcode");
        }
        let has_exclusion = self.reasons.iter().any(|t| t.is_exclusion());
        match self.verdict {
            Verdict::Irrelevant if !has_exclusion && self.note.trim().is_empty() => {
                invalid("irrelevant needs an exclusion tag or a note")
            }
            Verdict::Relevant | Verdict::Skipped if has_exclusion => {
                invalid("exclusion tags are only allowed on irrelevant")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub bibcode: String,
    pub verdict: Verdict,
    pub reasons: BTreeSet<RubricTag>,
    pub note: String,
    pub curator: String,
    pub decided_at: DateTime<Utc>,
    /// `YYYY-MM` of `decided_at` (UTC); groups decisions for the digest.
    pub month_stamp: String,
}

impl Decision {
    pub fn stamp(input: DecisionInput, curator: &str, at: DateTime<Utc>) -> Decision {
        Decision {
            bibcode: input.bibcode,
            verdict: input.verdict,
            reasons: input.reasons,
            note: input.note,
            curator: curator.to_string(),
            decided_at: at,
            month_stamp: month_stamp(at),
        }
    }
}

pub fn month_stamp(at: DateTime<Utc>) -> String {
    at.format("%Y-%m").to_string()
}

/// Checks a `YYYY-MM` string.
pub fn is_month_stamp(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 7
        && b[4] == b'-'
        && b[..4].iter().chain(&b[5..]).all(u8::is_ascii_digit)
        && matches!(
            &s[5..],
            "01" | "02" | "03" | "04" | "05" | "06" | "07" | "08" | "09" | "10" | "11" | "12"
        )
}

/// One line of the decision log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LogEntry {
    Decision {
        seq: u64,
        #[serde(flatten)]
        decision: Decision,
    },
    /// Withdraws the bibcode's latest standing decision.
    Undo {
        seq: u64,
        bibcode: String,
        curator: String,
        at: DateTime<Utc>,
    },
}

impl LogEntry {
    pub fn seq(&self) -> u64 {
        match self {
            LogEntry::Decision { seq, .. } | LogEntry::Undo { seq, .. } => *seq,
        }
    }

    pub fn bibcode(&self) -> &str {
        match self {
            LogEntry::Decision { decision, .. } => &decision.bibcode,
            LogEntry::Undo { bibcode, .. } => bibcode,
        }
    }
}

/// Per-bibcode decision history with undo applied: the last element is the
/// standing decision.
pub fn standing_decisions(
    entries: &[LogEntry],
) -> Result<BTreeMap<String, Vec<Decision>>, CurationError> {
    let mut stacks: BTreeMap<String, Vec<Decision>> = BTreeMap::new();
    for e in entries {
        apply_entry(&mut stacks, e)?;
    }
    Ok(stacks)
}

pub(crate) fn apply_entry(
    stacks: &mut BTreeMap<String, Vec<Decision>>,
    entry: &LogEntry,
) -> Result<(), CurationError> {
    apply_to_stack(
        stacks.entry(entry.bibcode().to_string()).or_default(),
        entry,
    )
}

/// Applies one entry to a single bibcode's decision history.
pub(crate) fn apply_to_stack(
    stack: &mut Vec<Decision>,
    entry: &LogEntry,
) -> Result<(), CurationError> {
    match entry {
        LogEntry::Decision { decision, .. } => stack.push(decision.clone()),
        LogEntry::Undo { bibcode, .. } => {
            stack
                .pop()
                .ok_or_else(|| CurationError::NothingToUndo(bibcode.clone()))?;
        }
    }
    Ok(())
}

/// Append-only JSON-lines decision log. Each entry is flushed and synced
/// before `append` returns.
#[derive(Debug, Default)]
pub struct DecisionLog {
    path: Option<PathBuf>,
    file: Option<File>,
    entries: Vec<LogEntry>,
}

impl DecisionLog {
    /// Log kept in memory only.
    pub fn in_memory() -> Self {
        DecisionLog::default()
    }

    /// Opens (creating if needed) a log file and loads its entries.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, CurationError> {
        let path = path.as_ref();
        let mut entries = Vec::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path).map_err(io_err(path))?);
            for (i, line) in reader.lines().enumerate() {
                let line = line.map_err(io_err(path))?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: LogEntry =
                    serde_json::from_str(&line).map_err(|e| CurationError::CorruptLog {
                        line: i + 1,
                        reason: e.to_string(),
                    })?;
                if entries
                    .last()
                    .is_some_and(|p: &LogEntry| p.seq() >= entry.seq())
                {
                    return Err(CurationError::CorruptLog {
                        line: i + 1,
                        reason: "sequence numbers must increase".into(),
                    });
                }
                entries.push(entry);
            }
            standing_decisions(&entries)?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err(path))?;
        Ok(DecisionLog {
            path: Some(path.to_path_buf()),
            file: Some(file),
            entries,
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    /// Sequence number of the latest entry (0 when empty).
    pub fn last_seq(&self) -> u64 {
        self.entries.last().map_or(0, LogEntry::seq)
    }

    pub fn append(&mut self, entry: LogEntry) -> Result<(), CurationError> {
        if entry.seq() <= self.last_seq() {
            return Err(CurationError::CorruptLog {
                line: self.entries.len() + 1,
                reason: "sequence numbers must increase".into(),
            });
        }
        if let Some(file) = &mut self.file {
            let path = self.path.as_deref().unwrap_or(Path::new("<log>"));
            let mut line = serde_json::to_string(&entry).expect("entry serializes");
            line.push('\n');
            file.write_all(line.as_bytes()).map_err(io_err(path))?;
            file.sync_data().map_err(io_err(path))?;
        }
        self.entries.push(entry);
        Ok(())
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CurationError + '_ {
    move |e| CurationError::Io(format!("{}: {e}", path.display()))
}
