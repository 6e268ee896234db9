//! Session state behind the HTTP API: one curation, one indexed corpus and
//! the active query. Every operation is synchronous; the router wraps the
//! session in a lock so reads run concurrently and decisions are serialized.

use std::path::PathBuf;
use std::sync::Arc;

use livebib::corpus::{evaluate_explained, explain_match, MatchExplanation};
use livebib::curation::{suggest_tags, Decision, Digest, TagHint};
use livebib::metrics::{citation_table, year_histogram, MetricsReport, YearHistogram};
use livebib::{
    parse, serialize, BibRecord, Curation, DecisionInput, Doctype, Index, QueryNode, RubricTag,
    SearchResult, Verdict,
};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

/// Default page size of `GET /queue`.
pub const DEFAULT_QUEUE_LIMIT: usize = 20;

pub struct Session {
    curation: Curation,
    index: Arc<Index>,
    query: QueryNode,
    catalog_path: Option<PathBuf>,
    decided: usize,
    undone: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QueueItem {
    pub bibcode: String,
    pub title: String,
    pub authors: Vec<String>,
    pub year: u16,
    pub doctype: Doctype,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub keywords: Vec<String>,
    pub highlights: Vec<MatchExplanation>,
    pub hints: Vec<TagHint>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QueueView {
    pub seq: u64,
    /// Residual size before `limit` is applied.
    pub total: usize,
    pub items: Vec<QueueItem>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecisionRequest {
    pub bibcode: String,
    pub verdict: String,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default)]
    pub note: String,
    #[serde(default)]
    pub expected_seq: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UndoRequest {
    pub bibcode: String,
    #[serde(default)]
    pub expected_seq: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SeqView {
    pub seq: u64,
    pub bibcode: String,
    /// Verdict now standing for the bibcode, if any.
    pub standing: Option<Verdict>,
    pub pending: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchRequest {
    pub q: String,
    #[serde(default)]
    pub year: Option<u16>,
    #[serde(default)]
    pub explain: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StatsView {
    pub seq: u64,
    pub relevant: usize,
    pub irrelevant: usize,
    pub pending: usize,
    pub report: MetricsReport,
    pub histogram: YearHistogram,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RecordView {
    pub record: BibRecord,
    pub decision: Option<Decision>,
    pub in_queue: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DigestView {
    pub month: String,
    pub markdown: String,
    pub digest: Digest,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    pub curator: String,
    pub query: String,
    pub seq: u64,
    pub pending: usize,
    pub decided: usize,
    pub undone: usize,
    pub relevant_library: String,
    pub irrelevant_library: String,
}

impl Session {
    /// Refuses queries that do not exclude both curation libraries, since
    /// the queue would otherwise show already-classified records.
    pub fn new(
        curation: Curation,
        index: Arc<Index>,
        query: QueryNode,
    ) -> Result<Session, ApiError> {
        curation.check_exclusions(&query)?;
        Ok(Session {
            curation,
            index,
            query,
            catalog_path: None,
            decided: 0,
            undone: 0,
        })
    }

    /// Snapshot the catalog to `path` after every decision.
    pub fn with_catalog_path(mut self, path: impl Into<PathBuf>) -> Self {
        self.catalog_path = Some(path.into());
        self
    }

    pub fn curation(&self) -> &Curation {
        &self.curation
    }

    pub fn seq(&self) -> u64 {
        self.curation.seq()
    }

    fn record(&self, bibcode: &str) -> Result<&BibRecord, ApiError> {
        self.index
            .corpus()
            .get(bibcode)
            .ok_or_else(|| ApiError::NotFound(format!("unknown bibcode {bibcode}")))
    }

    fn residual(&self) -> Result<Vec<String>, ApiError> {
        Ok(self.curation.residual(&self.query, &self.index)?)
    }

    pub fn queue(&self, limit: usize) -> Result<QueueView, ApiError> {
        let residual = self.residual()?;
        let mut items = Vec::new();
        for bibcode in residual.iter().take(limit) {
            let r = self.record(bibcode)?;
            let highlights =
                explain_match(bibcode, &self.query, &self.index, self.curation.catalog())
                    .map_err(|e| ApiError::Internal(e.to_string()))?;
            let hints = suggest_tags(r, &highlights);
            items.push(QueueItem {
                bibcode: r.bibcode.clone(),
                title: r.title.clone(),
                authors: r.authors.clone(),
                year: r.year,
                doctype: r.doctype,
                abstract_text: r.abstract_text.clone(),
                keywords: r.keywords.clone(),
                highlights,
                hints,
            });
        }
        Ok(QueueView {
            seq: self.seq(),
            total: residual.len(),
            items,
        })
    }

    fn check_seq(&self, expected: Option<u64>) -> Result<(), ApiError> {
        match expected {
            Some(expected) if expected != self.seq() => Err(ApiError::StaleSeq {
                expected,
                current: self.seq(),
            }),
            _ => Ok(()),
        }
    }

    fn persist_catalog(&self) -> Result<(), ApiError> {
        if let Some(path) = &self.catalog_path {
            self.curation
                .catalog()
                .snapshot(path)
                .map_err(|e| ApiError::Internal(format!("catalog snapshot: {e}")))?;
        }
        Ok(())
    }

    fn seq_view(&self, bibcode: String) -> Result<SeqView, ApiError> {
        Ok(SeqView {
            seq: self.seq(),
            standing: self.curation.standing(&bibcode).map(|d| d.verdict),
            bibcode,
            pending: self.residual()?.len(),
        })
    }

    pub fn decide(&mut self, req: DecisionRequest) -> Result<SeqView, ApiError> {
        let verdict: Verdict = req
            .verdict
            .parse()
            .map_err(|_| ApiError::BadRequest(format!("unknown verdict `{}`", req.verdict)))?;
        let mut input = DecisionInput::new(req.bibcode.clone(), verdict).note(req.note);
        for t in &req.tags {
            let tag: RubricTag = t
                .parse()
                .map_err(|_| ApiError::BadRequest(format!("unknown rubric tag `{t}`")))?;
            input = input.tag(tag);
        }
        self.check_seq(req.expected_seq)?;
        self.record(&req.bibcode)?;
        self.curation.decide(input)?;
        self.decided += 1;
        self.persist_catalog()?;
        self.seq_view(req.bibcode)
    }

    pub fn undo(&mut self, req: UndoRequest) -> Result<SeqView, ApiError> {
        self.check_seq(req.expected_seq)?;
        self.record(&req.bibcode)?;
        self.curation.undo(&req.bibcode)?;
        self.undone += 1;
        self.persist_catalog()?;
        self.seq_view(req.bibcode)
    }

    pub fn stats(&self) -> Result<StatsView, ApiError> {
        let members = self.curation.relevant_members();
        let corpus = self.index.corpus();
        Ok(StatsView {
            seq: self.seq(),
            relevant: members.len(),
            irrelevant: self.curation.irrelevant_members().len(),
            pending: self.residual()?.len(),
            report: citation_table(members, corpus),
            histogram: year_histogram(members, corpus),
        })
    }

    pub fn search(&self, req: SearchRequest) -> Result<SearchResult, ApiError> {
        let mut query = parse(&req.q).map_err(|e| ApiError::BadRequest(e.to_string()))?;
        if let Some(year) = req.year {
            query = query.restrict_years(year, year);
        }
        let catalog = self.curation.catalog();
        let result = if req.explain {
            evaluate_explained(&query, &self.index, catalog)
        } else {
            livebib::evaluate(&query, &self.index, catalog)
        };
        result.map_err(|e| ApiError::BadRequest(e.to_string()))
    }

    pub fn record_view(&self, bibcode: &str) -> Result<RecordView, ApiError> {
        let record = self.record(bibcode)?.clone();
        Ok(RecordView {
            decision: self.curation.standing(bibcode).cloned(),
            in_queue: self.residual()?.iter().any(|b| b == bibcode),
            record,
        })
    }

    pub fn digest(&self, month: &str) -> Result<DigestView, ApiError> {
        let digest = self.curation.render_digest(month, self.index.corpus())?;
        Ok(DigestView {
            month: month.to_string(),
            markdown: digest.to_markdown(),
            digest,
        })
    }

    pub fn info(&self) -> Result<SessionView, ApiError> {
        let libs = self.curation.libraries();
        Ok(SessionView {
            curator: self.curation.curator().to_string(),
            query: serialize(&self.query),
            seq: self.seq(),
            pending: self.residual()?.len(),
            decided: self.decided,
            undone: self.undone,
            relevant_library: libs.relevant.clone(),
            irrelevant_library: libs.irrelevant.clone(),
        })
    }
}
