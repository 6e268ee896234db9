//! The curation loop: evaluate a guarded query, route each hit into the
//! relevant or irrelevant library according to a decision source, and
//! repeat until nothing new comes back.
//!
//! Every decision is appended to a [`DecisionLog`] before membership
//! changes become visible, so the libraries can be rebuilt from the log.
//! Library membership follows the standing decision of each bibcode:
//! Relevant puts it in the relevant library, Irrelevant in the irrelevant
//! one, and Skipped (or an undo back to nothing) removes it from both.

mod batch;
mod decision;
mod digest;
mod rubric;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use batch::{format_batch_line, parse_batch, BatchDecisions};
pub use decision::{
    is_month_stamp, month_stamp, standing_decisions, Decision, DecisionInput, DecisionLog, LogEntry,
};
pub use digest::{Digest, DigestEntry, DigestSection};
pub use rubric::{suggest_tags, RubricTag, TagHint, Verdict, COMMENSAL_CHECKLIST};

use crate::clock::Clock;
use crate::corpus::{evaluate, BibRecord, Corpus, Doctype, EvalError, Index};
use crate::library::{Catalog, LibraryError};
use crate::query::{normalize, QueryNode};

/// Curator id recorded on decisions made by [`auto_rules`].
pub const AUTO_CURATOR: &str = "auto-rules";

#[derive(Debug, Error)]
pub enum CurationError {
    #[error("query must exclude docs(library/{})", missing.join(") and docs(library/"))]
    MissingExclusions { missing: Vec<String> },
    #[error("no decision available for {0}")]
    DecisionSourceExhausted(String),
    #[error("invalid decision for {bibcode}: {reason}")]
    InvalidDecision { bibcode: String, reason: String },
    #[error("no decision to undo for {0}")]
    NothingToUndo(String),
    #[error("invalid library setup: {0}")]
    InvalidLibraries(String),
    #[error("invalid month {0:?}; expected YYYY-MM")]
    InvalidMonth(String),
    #[error("decision log line {line}: {reason}")]
    CorruptLog { line: usize, reason: String },
    #[error("batch file line {line}: {reason}")]
    Batch { line: usize, reason: String },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Supplies verdicts for records the cycle cannot decide on its own.
pub trait DecisionSource {
    fn decide(&mut self, record: &BibRecord) -> Option<DecisionInput>;
}

impl<F: FnMut(&BibRecord) -> Option<DecisionInput>> DecisionSource for F {
    fn decide(&mut self, record: &BibRecord) -> Option<DecisionInput> {
        self(record)
    }
}

/// Keys of the libraries a curation workspace writes to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurationLibraries {
    pub relevant: String,
    pub irrelevant: String,
    /// Receives each month's Relevant decisions via [`Curation::stage_month`].
    pub staging: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CycleReport {
    pub iterations: u32,
    pub classified_relevant: usize,
    pub classified_irrelevant: usize,
    pub skipped: usize,
    pub converged: bool,
    /// Hits left after the last evaluation (all skipped).
    pub residual: Vec<String>,
}

impl fmt::Display for CycleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "iterations: {}", self.iterations)?;
        writeln!(f, "relevant: {}", self.classified_relevant)?;
        writeln!(f, "irrelevant: {}", self.classified_irrelevant)?;
        writeln!(f, "skipped: {}", self.skipped)?;
        writeln!(f, "converged: {}", self.converged)?;
        for b in &self.residual {
            writeln!(f, "residual: {b}")?;
        }
        Ok(())
    }
}

/// The only automatic decision: book reviews are always out of scope.
pub fn auto_rules(record: &BibRecord) -> Option<DecisionInput> {
    (record.doctype == Doctype::Bookreview).then(|| {
        DecisionInput::new(record.bibcode.clone(), Verdict::Irrelevant)
            .tag(RubricTag::ExcludedBookReview)
            .note("automatic: book review")
    })
}

/// Catalog, decision log and library roles for one curation effort.
pub struct Curation {
    catalog: Catalog,
    log: DecisionLog,
    libs: CurationLibraries,
    curator: String,
    clock: Arc<dyn Clock>,
    standing: BTreeMap<String, Vec<Decision>>,
}

impl fmt::Debug for Curation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curation")
            .field("libs", &self.libs)
            .field("curator", &self.curator)
            .field("seq", &self.seq())
            .finish()
    }
}

impl Curation {
    /// Opens a workspace. The catalog is assumed to already reflect `log`;
    /// the relevant/irrelevant pair is made mutually exclusive.
    pub fn new(
        mut catalog: Catalog,
        log: DecisionLog,
        libs: CurationLibraries,
        curator: &str,
    ) -> Result<Curation, CurationError> {
        if libs.relevant == libs.irrelevant {
            return Err(CurationError::InvalidLibraries(
                "relevant and irrelevant libraries must differ".into(),
            ));
        }
        for key in [&libs.relevant, &libs.irrelevant]
            .into_iter()
            .chain(&libs.staging)
        {
            catalog.members(key)?;
        }
        if libs
            .staging
            .as_ref()
            .is_some_and(|s| *s == libs.relevant || *s == libs.irrelevant)
        {
            return Err(CurationError::InvalidLibraries(
                "staging library must differ from the relevant and irrelevant ones".into(),
            ));
        }
        catalog.set_exclusive(&libs.relevant, &libs.irrelevant)?;
        catalog.set_actor(curator);
        let standing = standing_decisions(log.entries())?;
        let clock = catalog.clock().clone();
        Ok(Curation {
            catalog,
            log,
            libs,
            curator: curator.to_string(),
            clock,
            standing,
        })
    }

    /// Rebuilds membership by replaying `entries` onto `catalog` (normally
    /// with empty libraries), keeping the original stamps. The result holds
    /// an in-memory copy of the log.
    pub fn replay(
        catalog: Catalog,
        entries: &[LogEntry],
        libs: CurationLibraries,
        curator: &str,
    ) -> Result<Curation, CurationError> {
        let mut c = Curation::new(catalog, DecisionLog::in_memory(), libs, curator)?;
        for e in entries {
            decision::apply_entry(&mut c.standing, e)?;
            let verdict = c.standing_verdict(e.bibcode());
            route(&mut c.catalog, &c.libs, e.bibcode(), verdict)?;
            c.log.append(e.clone())?;
        }
        Ok(c)
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    /// Mutable catalog access for operations outside the curation loop.
    pub fn catalog_mut(&mut self) -> &mut Catalog {
        &mut self.catalog
    }

    pub fn into_catalog(self) -> Catalog {
        self.catalog
    }

    pub fn log(&self) -> &DecisionLog {
        &self.log
    }

    pub fn libraries(&self) -> &CurationLibraries {
        &self.libs
    }

    pub fn curator(&self) -> &str {
        &self.curator
    }

    /// Sequence number of the latest logged entry.
    pub fn seq(&self) -> u64 {
        self.log.last_seq()
    }

    pub fn relevant_members(&self) -> &BTreeSet<String> {
        self.catalog
            .members(&self.libs.relevant)
            .expect("checked at open")
    }

    pub fn irrelevant_members(&self) -> &BTreeSet<String> {
        self.catalog
            .members(&self.libs.irrelevant)
            .expect("checked at open")
    }

    /// The decision currently in force for `bibcode`.
    pub fn standing(&self, bibcode: &str) -> Option<&Decision> {
        self.standing.get(bibcode).and_then(|s| s.last())
    }

    /// All decisions currently in force, by bibcode.
    pub fn standing_all(&self) -> impl Iterator<Item = &Decision> {
        self.standing.values().filter_map(|s| s.last())
    }

    fn standing_verdict(&self, bibcode: &str) -> Option<Verdict> {
        self.standing(bibcode).map(|d| d.verdict)
    }

    /// Records a decision and routes the bibcode; returns the new sequence
    /// number.
    pub fn decide(&mut self, input: DecisionInput) -> Result<u64, CurationError> {
        let curator = self.curator.clone();
        self.decide_as(input, &curator)
    }

    fn decide_as(&mut self, input: DecisionInput, curator: &str) -> Result<u64, CurationError> {
        input.check()?;
        let decision = Decision::stamp(input, curator, self.clock.now());
        let entry = LogEntry::Decision {
            seq: self.seq() + 1,
            decision,
        };
        self.commit(entry)
    }

    /// Withdraws the standing decision for `bibcode`; membership follows the
    /// previous decision, or is removed when there is none.
    pub fn undo(&mut self, bibcode: &str) -> Result<u64, CurationError> {
        if self.standing(bibcode).is_none() {
            return Err(CurationError::NothingToUndo(bibcode.to_string()));
        }
        let entry = LogEntry::Undo {
            seq: self.seq() + 1,
            bibcode: bibcode.to_string(),
            curator: self.curator.clone(),
            at: self.clock.now(),
        };
        self.commit(entry)
    }

    /// Routes on a scratch copy first so a rejected change leaves no trace,
    /// then appends to the log, then publishes the new membership.
    fn commit(&mut self, entry: LogEntry) -> Result<u64, CurationError> {
        let bibcode = entry.bibcode().to_string();
        let mut stack = self.standing.get(&bibcode).cloned().unwrap_or_default();
        decision::apply_to_stack(&mut stack, &entry)?;
        let mut scratch = self.catalog.clone();
        route(
            &mut scratch,
            &self.libs,
            &bibcode,
            stack.last().map(|d| d.verdict),
        )?;
        self.log.append(entry.clone())?;
        self.catalog = scratch;
        self.standing.insert(bibcode, stack);
        Ok(entry.seq())
    }

    /// Fails unless the query's top level excludes both curation libraries.
    pub fn check_exclusions(&self, query: &QueryNode) -> Result<(), CurationError> {
        let mut guarded = BTreeSet::new();
        if let QueryNode::And { children } = normalize(query) {
            for c in children {
                if let QueryNode::Not { child } = c {
                    if let QueryNode::DocsRef { key } = *child {
                        guarded.insert(key);
                    }
                }
            }
        }
        let missing: Vec<String> = [&self.libs.relevant, &self.libs.irrelevant]
            .into_iter()
            .filter(|k| !guarded.contains(*k))
            .cloned()
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(CurationError::MissingExclusions { missing })
        }
    }

    /// Current hits of `query` against the catalog.
    pub fn residual(&self, query: &QueryNode, index: &Index) -> Result<Vec<String>, CurationError> {
        Ok(evaluate(query, index, &self.catalog)?.hits)
    }

    /// Evaluates, classifies every new hit, and repeats until a pass yields
    /// nothing but records skipped during this cycle.
    pub fn run_update_cycle(
        &mut self,
        query: &QueryNode,
        index: &Index,
        source: &mut dyn DecisionSource,
    ) -> Result<CycleReport, CurationError> {
        self.check_exclusions(query)?;
        let mut report = CycleReport::default();
        let mut skipped = BTreeSet::new();
        loop {
            report.iterations += 1;
            let hits = self.residual(query, index)?;
            let pending: Vec<&String> = hits.iter().filter(|b| !skipped.contains(*b)).collect();
            log::info!(
                "pass {}: {} hits, {} to classify",
                report.iterations,
                hits.len(),
                pending.len()
            );
            if pending.is_empty() {
                report.residual = hits;
                break;
            }
            for bibcode in pending {
                let record = index
                    .corpus()
                    .get(bibcode)
                    .expect("hits come from the indexed corpus");
                let (input, curator) = match auto_rules(record) {
                    Some(d) => (d, AUTO_CURATOR.to_string()),
                    None => (
                        source.decide(record).ok_or_else(|| {
                            CurationError::DecisionSourceExhausted(bibcode.clone())
                        })?,
                        self.curator.clone(),
                    ),
                };
                if input.bibcode != *bibcode {
                    return Err(CurationError::InvalidDecision {
                        bibcode: bibcode.clone(),
                        reason: format!("source answered for {}", input.bibcode),
                    });
                }
                let verdict = input.verdict;
                self.decide_as(input, &curator)?;
                match verdict {
                    Verdict::Relevant => report.classified_relevant += 1,
                    Verdict::Irrelevant => report.classified_irrelevant += 1,
                    Verdict::Skipped => {
                        report.skipped += 1;
                        skipped.insert(bibcode.clone());
                    }
                }
            }
        }
        report.converged = report.residual.is_empty();
        Ok(report)
    }

    /// Bibcodes whose standing decision is Relevant and was made in `month`.
    pub fn month_relevant(&self, month: &str) -> Result<Vec<String>, CurationError> {
        if !is_month_stamp(month) {
            return Err(CurationError::InvalidMonth(month.to_string()));
        }
        Ok(self
            .standing_all()
            .filter(|d| d.verdict == Verdict::Relevant && d.month_stamp == month)
            .map(|d| d.bibcode.clone())
            .collect())
    }

    /// Sets the staging library to exactly the month's Relevant decisions;
    /// returns how many were newly added.
    pub fn stage_month(&mut self, month: &str) -> Result<usize, CurationError> {
        let staging = self.libs.staging.clone().ok_or_else(|| {
            CurationError::InvalidLibraries("no staging library configured".into())
        })?;
        let wanted: BTreeSet<String> = self.month_relevant(month)?.into_iter().collect();
        let stale: Vec<String> = self
            .catalog
            .members(&staging)?
            .difference(&wanted)
            .cloned()
            .collect();
        if !stale.is_empty() {
            self.catalog.remove_members(&staging, stale)?;
        }
        let fresh: Vec<String> = wanted
            .difference(self.catalog.members(&staging)?)
            .cloned()
            .collect();
        if fresh.is_empty() {
            return Ok(0);
        }
        Ok(self.catalog.add_members(&staging, fresh)?)
    }

    pub fn render_digest(&self, month: &str, corpus: &Corpus) -> Result<Digest, CurationError> {
        let digest = Digest::build(month, &self.month_relevant(month)?, corpus);
        for w in &digest.warnings {
            log::warn!("{w}");
        }
        Ok(digest)
    }
}

/// Makes library membership match `verdict`. Removals go first so the
/// exclusive pair never overlaps.
fn route(
    catalog: &mut Catalog,
    libs: &CurationLibraries,
    bibcode: &str,
    verdict: Option<Verdict>,
) -> Result<(), LibraryError> {
    let (keep, drop): (Option<&str>, Vec<&str>) = match verdict {
        Some(Verdict::Relevant) => (Some(&libs.relevant), vec![&libs.irrelevant]),
        Some(Verdict::Irrelevant) => (Some(&libs.irrelevant), vec![&libs.relevant]),
        Some(Verdict::Skipped) | None => (None, vec![&libs.relevant, &libs.irrelevant]),
    };
    for key in drop {
        if catalog.members(key)?.contains(bibcode) {
            catalog.remove_members(key, [bibcode])?;
        }
    }
    if let Some(key) = keep {
        if !catalog.members(key)?.contains(bibcode) {
            catalog.add_members(key, [bibcode])?;
        }
    }
    Ok(())
}

/// Membership of (relevant, irrelevant) implied by a log replayed from
/// empty libraries.
pub fn replay_membership(
    entries: &[LogEntry],
) -> Result<(BTreeSet<String>, BTreeSet<String>), CurationError> {
    let mut relevant = BTreeSet::new();
    let mut irrelevant = BTreeSet::new();
    for (bibcode, stack) in standing_decisions(entries)? {
        match stack.last().map(|d| d.verdict) {
            Some(Verdict::Relevant) => {
                relevant.insert(bibcode);
            }
            Some(Verdict::Irrelevant) => {
                irrelevant.insert(bibcode);
            }
            _ => {}
        }
    }
    Ok((relevant, irrelevant))
}
