use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Condvar, Mutex};

use chrono::{DateTime, TimeZone, Utc};
use serde::de::DeserializeOwned;

use super::wire::{
    DocumentAction, DocumentsRequest, DocumentsResponse, LibraryResponse, SearchResponse,
    WireRequest, WireResponse, DOCUMENTS_PATH, HEADER_REMAINING, HEADER_RESET, LIBRARY_PATH,
    SEARCH_PATH, SEARCH_SORT,
};
use super::{RemoteConfig, RemoteError, RemoteOutcome, Transport};
use crate::clock::{Clock, SystemClock};
use crate::library::is_valid_key;
use crate::query::{serialize, QueryNode};

/// First-come first-served turnstile: one request in flight, callers served
/// in arrival order.
#[derive(Default)]
struct Gate {
    tickets: Mutex<(u64, u64)>,
    turn: Condvar,
}

struct Turn<'a>(&'a Gate);

impl Gate {
    fn enter(&self) -> Turn<'_> {
        let mut t = self.tickets.lock().unwrap();
        let mine = t.0;
        t.0 += 1;
        while t.1 != mine {
            t = self.turn.wait(t).unwrap();
        }
        Turn(self)
    }
}

impl Drop for Turn<'_> {
    fn drop(&mut self) {
        self.0.tickets.lock().unwrap().1 += 1;
        self.0.turn.notify_all();
    }
}

#[derive(Default)]
struct State {
    remaining: Option<u64>,
    reset_at: Option<DateTime<Utc>>,
    cache: HashMap<String, (Vec<String>, DateTime<Utc>)>,
}

/// Remote client over any [`Transport`].
pub struct RemoteClient<T: Transport> {
    transport: T,
    config: RemoteConfig,
    clock: Arc<dyn Clock>,
    gate: Gate,
    state: Mutex<State>,
}

impl<T: Transport> RemoteClient<T> {
    pub fn new(transport: T, config: RemoteConfig) -> Result<Self, RemoteError> {
        Self::with_clock(transport, config, Arc::new(SystemClock))
    }

    pub fn with_clock(
        transport: T,
        config: RemoteConfig,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, RemoteError> {
        config.validate()?;
        Ok(RemoteClient {
            transport,
            config,
            clock,
            gate: Gate::default(),
            state: Mutex::new(State::default()),
        })
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    /// Last quota state reported by the server.
    pub fn quota(&self) -> (Option<u64>, Option<DateTime<Utc>>) {
        let s = self.state.lock().unwrap();
        (s.remaining, s.reset_at)
    }

    pub fn clear_cache(&self) {
        self.state.lock().unwrap().cache.clear();
    }

    fn outcome<P>(&self, payload: P) -> RemoteOutcome<P> {
        let (quota_remaining, quota_reset_at) = self.quota();
        RemoteOutcome {
            payload,
            quota_remaining,
            quota_reset_at,
        }
    }

    /// All bibcodes matching `query` (optionally restricted to one year), in
    /// remote order. Results are cached per query text for `cache_ttl`.
    pub fn remote_search(
        &self,
        query: &QueryNode,
        year: Option<u16>,
    ) -> Result<RemoteOutcome<Vec<String>>, RemoteError> {
        let query = match year {
            Some(y) => query.clone().restrict_years(y, y),
            None => query.clone(),
        };
        self.search_text(&serialize(&query))
    }

    /// Like [`remote_search`](Self::remote_search) for already serialized
    /// query text.
    pub fn search_text(&self, q: &str) -> Result<RemoteOutcome<Vec<String>>, RemoteError> {
        let now = self.clock.now();
        let cached = self.state.lock().unwrap().cache.get(q).cloned();
        if let Some((hits, fetched_at)) = cached {
            let age = (now - fetched_at).to_std().unwrap_or_default();
            if age < self.config.cache_ttl {
                return Ok(self.outcome(hits));
            }
        }
        let mut hits = Vec::new();
        loop {
            let req = WireRequest::get(SEARCH_PATH)
                .param("q", q)
                .param("fl", "bibcode")
                .param("sort", SEARCH_SORT)
                .param("rows", self.config.page_size)
                .param("start", hits.len());
            let resp = self.exchange(&req)?;
            if resp.status == 404 {
                return Err(RemoteError::Protocol("search endpoint not found".into()));
            }
            let page: SearchResponse = decode(&resp)?;
            let n = page.response.docs.len();
            hits.extend(page.response.docs.into_iter().map(|d| d.bibcode));
            if n == 0 || hits.len() >= page.response.num_found {
                break;
            }
        }
        self.state
            .lock()
            .unwrap()
            .cache
            .insert(q.to_string(), (hits.clone(), self.clock.now()));
        Ok(self.outcome(hits))
    }

    /// Current members of a remote library.
    pub fn pull_library(&self, key: &str) -> Result<RemoteOutcome<BTreeSet<String>>, RemoteError> {
        check_key(key)?;
        let mut members = BTreeSet::new();
        let mut start = 0;
        loop {
            let req = WireRequest::get(format!("{LIBRARY_PATH}{key}"))
                .param("rows", self.config.page_size)
                .param("start", start);
            let resp = self.exchange(&req)?;
            if resp.status == 404 {
                return Err(RemoteError::UnknownRemoteLibrary(key.to_string()));
            }
            let page: LibraryResponse = decode(&resp)?;
            let n = page.documents.len();
            start += n;
            members.extend(page.documents);
            if n == 0 || start >= page.metadata.num_documents {
                break;
            }
        }
        Ok(self.outcome(members))
    }

    /// Adds bibcodes to a remote library; returns how many were new.
    pub fn push_add<I, S>(
        &self,
        key: &str,
        bibcodes: I,
    ) -> Result<RemoteOutcome<usize>, RemoteError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.push(key, bibcodes, DocumentAction::Add)
    }

    /// Removes bibcodes from a remote library; returns how many were present.
    pub fn push_remove<I, S>(
        &self,
        key: &str,
        bibcodes: I,
    ) -> Result<RemoteOutcome<usize>, RemoteError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.push(key, bibcodes, DocumentAction::Remove)
    }

    fn push<I, S>(
        &self,
        key: &str,
        bibcodes: I,
        action: DocumentAction,
    ) -> Result<RemoteOutcome<usize>, RemoteError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        check_key(key)?;
        let all: Vec<String> = bibcodes
            .into_iter()
            .map(Into::into)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut changed = 0;
        for chunk in all.chunks(self.config.page_size) {
            let body = DocumentsRequest {
                bibcode: chunk.to_vec(),
                action,
            };
            let req = WireRequest::post(
                format!("{DOCUMENTS_PATH}{key}"),
                serde_json::to_string(&body).expect("request serializes"),
            );
            let resp = self.exchange(&req)?;
            if resp.status == 404 {
                return Err(RemoteError::UnknownRemoteLibrary(key.to_string()));
            }
            let counts: DocumentsResponse = decode(&resp)?;
            changed += match action {
                DocumentAction::Add => counts.number_added,
                DocumentAction::Remove => counts.number_removed,
            }
            .ok_or_else(|| RemoteError::Protocol("missing document count".into()))?;
        }
        Ok(self.outcome(changed))
    }

    /// Bibcodes present in both remote libraries; empty when healthy.
    pub fn verify_remote_disjoint(
        &self,
        a: &str,
        b: &str,
    ) -> Result<RemoteOutcome<BTreeSet<String>>, RemoteError> {
        let left = self.pull_library(a)?.payload;
        let right = self.pull_library(b)?.payload;
        Ok(self.outcome(left.intersection(&right).cloned().collect()))
    }

    /// Sends one request with quota checks and retries. 404 is returned to
    /// the caller, which knows what was missing.
    fn exchange(&self, request: &WireRequest) -> Result<WireResponse, RemoteError> {
        let _turn = self.gate.enter();
        let mut request = request.clone();
        if let Some(token) = &self.config.auth_token {
            request
                .headers
                .push(("Authorization".into(), format!("Bearer {token}")));
        }
        let mut attempts = 0;
        loop {
            attempts += 1;
            self.check_quota()?;
            log::debug!(
                "remote {:?} {} (attempt {attempts})",
                request.method,
                request.path
            );
            let reason = match self.transport.send(&request) {
                Ok(resp) => {
                    self.record_quota(&resp);
                    match resp.status {
                        200..=299 | 404 => return Ok(resp),
                        401 | 403 => return Err(RemoteError::AuthFailure),
                        429 => {
                            let reset_at = self.quota().1.unwrap_or_else(|| self.clock.now());
                            return Err(RemoteError::QuotaExhausted { reset_at });
                        }
                        500..=599 => format!("status {}", resp.status),
                        other => {
                            return Err(RemoteError::Protocol(format!("unexpected status {other}")))
                        }
                    }
                }
                Err(e) => e.to_string(),
            };
            if attempts > self.config.max_retries {
                return Err(RemoteError::TransientFailure { attempts, reason });
            }
            log::warn!("remote request failed ({reason}); retrying");
            self.clock.sleep(self.config.backoff_for(attempts));
        }
    }

    fn check_quota(&self) -> Result<(), RemoteError> {
        let s = self.state.lock().unwrap();
        if let (Some(0), Some(reset_at)) = (s.remaining, s.reset_at) {
            if self.clock.now() < reset_at {
                return Err(RemoteError::QuotaExhausted { reset_at });
            }
        }
        Ok(())
    }

    fn record_quota(&self, resp: &WireResponse) {
        let mut s = self.state.lock().unwrap();
        if let Some(n) = resp
            .header(HEADER_REMAINING)
            .and_then(|v| v.trim().parse().ok())
        {
            s.remaining = Some(n);
        }
        if let Some(t) = resp
            .header(HEADER_RESET)
            .and_then(|v| v.trim().parse::<i64>().ok())
            .and_then(|secs| Utc.timestamp_opt(secs, 0).single())
        {
            s.reset_at = Some(t);
        }
    }
}

fn check_key(key: &str) -> Result<(), RemoteError> {
    if is_valid_key(key) {
        Ok(())
    } else {
        Err(RemoteError::UnknownRemoteLibrary(key.to_string()))
    }
}

fn decode<P: DeserializeOwned>(resp: &WireResponse) -> Result<P, RemoteError> {
    serde_json::from_str(&resp.body).map_err(|e| RemoteError::Protocol(e.to_string()))
}
