use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use chrono::{DateTime, TimeZone, Utc};
use serde::Serialize;

use super::wire::{
    DocumentAction, DocumentsRequest, DocumentsResponse, LibraryMetadata, LibraryResponse, Method,
    SearchDoc, SearchPage, SearchResponse, Transport, TransportError, WireRequest, WireResponse,
    DOCUMENTS_PATH, HEADER_LIMIT, HEADER_REMAINING, HEADER_RESET, LIBRARY_PATH, SEARCH_PATH,
};
use super::MAX_PAGE_SIZE;
use crate::clock::Clock;
use crate::corpus::{evaluate, Index};
use crate::query::parse;

/// Request tallies kept by [`FakeAds`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FakeCounters {
    /// Every request received.
    pub requests: u64,
    /// Requests received while the quota was exhausted.
    pub quota_violations: u64,
    pub auth_failures: u64,
    pub injected_failures: u64,
}

#[derive(Debug, Clone, Copy)]
enum Failure {
    /// Answer with this status without touching state.
    Before(u16),
    /// Apply the request, then answer with this status (a lost response).
    After(u16),
    Disconnect,
}

struct FakeLibrary {
    name: String,
    members: BTreeSet<String>,
}

struct State {
    index: Option<Arc<Index>>,
    libraries: BTreeMap<String, FakeLibrary>,
    tokens: BTreeSet<String>,
    limit: u64,
    remaining: u64,
    window: Duration,
    reset_at: DateTime<Utc>,
    counters: FakeCounters,
    failures: VecDeque<Failure>,
}

/// In-process implementation of the remote wire contract.
///
/// Searches are answered by evaluating `q` against an optional local index,
/// with `docs(library/KEY)` resolved against the fake's own libraries.
pub struct FakeAds {
    clock: Arc<dyn Clock>,
    state: Mutex<State>,
}

impl FakeAds {
    /// Token accepted by a fresh fake.
    pub const TOKEN: &'static str = "fake-token";

    pub fn new(clock: Arc<dyn Clock>) -> Self {
        let now = clock.now();
        let window = Duration::from_secs(24 * 3600);
        FakeAds {
            state: Mutex::new(State {
                index: None,
                libraries: BTreeMap::new(),
                tokens: BTreeSet::from([Self::TOKEN.to_string()]),
                limit: 5000,
                remaining: 5000,
                window,
                reset_at: whole_second_after(now, window),
                counters: FakeCounters::default(),
                failures: VecDeque::new(),
            }),
            clock,
        }
    }

    pub fn with_index(self, index: Arc<Index>) -> Self {
        self.state.lock().unwrap().index = Some(index);
        self
    }

    pub fn add_library<I, S>(&self, key: &str, name: &str, members: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.state.lock().unwrap().libraries.insert(
            key.to_string(),
            FakeLibrary {
                name: name.to_string(),
                members: members.into_iter().map(Into::into).collect(),
            },
        );
    }

    pub fn library(&self, key: &str) -> Option<BTreeSet<String>> {
        self.state
            .lock()
            .unwrap()
            .libraries
            .get(key)
            .map(|l| l.members.clone())
    }

    /// Starts a fresh quota window of `limit` requests lasting `window`.
    pub fn set_quota(&self, limit: u64, window: Duration) {
        let now = self.clock.now();
        let mut s = self.state.lock().unwrap();
        s.limit = limit;
        s.remaining = limit;
        s.window = window;
        s.reset_at = whole_second_after(now, window);
    }

    pub fn fail_next(&self, status: u16) {
        self.state
            .lock()
            .unwrap()
            .failures
            .push_back(Failure::Before(status));
    }

    pub fn fail_after_apply(&self, status: u16) {
        self.state
            .lock()
            .unwrap()
            .failures
            .push_back(Failure::After(status));
    }

    pub fn disconnect_next(&self) {
        self.state
            .lock()
            .unwrap()
            .failures
            .push_back(Failure::Disconnect);
    }

    pub fn counters(&self) -> FakeCounters {
        self.state.lock().unwrap().counters
    }

    /// Answers one request.
    pub fn handle(&self, req: &WireRequest) -> Result<WireResponse, TransportError> {
        let now = self.clock.now();
        let mut s = self.state.lock().unwrap();
        s.counters.requests += 1;

        let authorized = req
            .header("Authorization")
            .and_then(|h| h.strip_prefix("Bearer "))
            .is_some_and(|t| s.tokens.contains(t));
        if !authorized {
            s.counters.auth_failures += 1;
            return Ok(s.reply(401, &Message::new("unauthorized")));
        }

        if now >= s.reset_at {
            s.remaining = s.limit;
            s.reset_at = whole_second_after(now, s.window);
        }
        if s.remaining == 0 {
            s.counters.quota_violations += 1;
            return Ok(s.reply(429, &Message::new("rate limit exceeded")));
        }
        s.remaining -= 1;

        let failure = s.failures.pop_front();
        match failure {
            Some(Failure::Before(status)) => {
                s.counters.injected_failures += 1;
                return Ok(s.reply(status, &Message::new("injected failure")));
            }
            Some(Failure::Disconnect) => {
                s.counters.injected_failures += 1;
                return Err(TransportError("connection reset (injected)".into()));
            }
            _ => {}
        }
        let response = s.route(req);
        if let Some(Failure::After(status)) = failure {
            s.counters.injected_failures += 1;
            return Ok(s.reply(status, &Message::new("injected failure after apply")));
        }
        Ok(response)
    }
}

impl Transport for FakeAds {
    fn send(&self, request: &WireRequest) -> Result<WireResponse, TransportError> {
        self.handle(request)
    }
}

#[derive(Serialize)]
struct Message {
    error: String,
}

impl Message {
    fn new(text: &str) -> Self {
        Message { error: text.into() }
    }
}

fn whole_second_after(now: DateTime<Utc>, window: Duration) -> DateTime<Utc> {
    let target = now + chrono::Duration::from_std(window).expect("window in range");
    let secs = target.timestamp() + i64::from(target.timestamp_subsec_nanos() > 0);
    Utc.timestamp_opt(secs, 0)
        .single()
        .expect("valid timestamp")
}

fn paging(req: &WireRequest) -> Result<(usize, usize), String> {
    let num = |name: &str, default: usize| match req.query_value(name) {
        None => Ok(default),
        Some(v) => v.parse::<usize>().map_err(|_| format!("bad {name}: {v}")),
    };
    let rows = num("rows", 10)?.clamp(1, MAX_PAGE_SIZE);
    Ok((num("start", 0)?, rows))
}

impl State {
    fn reply<B: Serialize>(&self, status: u16, body: &B) -> WireResponse {
        WireResponse {
            status,
            headers: vec![
                ("Content-Type".into(), "application/json".into()),
                (HEADER_LIMIT.into(), self.limit.to_string()),
                (HEADER_REMAINING.into(), self.remaining.to_string()),
                (HEADER_RESET.into(), self.reset_at.timestamp().to_string()),
            ],
            body: serde_json::to_string(body).expect("body serializes"),
        }
    }

    fn route(&mut self, req: &WireRequest) -> WireResponse {
        let result = match req.method {
            Method::Get if req.path == SEARCH_PATH => self.search(req),
            Method::Get => match req.path.strip_prefix(LIBRARY_PATH) {
                Some(key) => self.get_library(key, req),
                None => Err((404, "no such endpoint".to_string())),
            },
            Method::Post => match req.path.strip_prefix(DOCUMENTS_PATH) {
                Some(key) => self.change_documents(key, req),
                None => Err((404, "no such endpoint".to_string())),
            },
        };
        match result {
            Ok(resp) => resp,
            Err((status, text)) => self.reply(status, &Message::new(&text)),
        }
    }

    fn search(&self, req: &WireRequest) -> Result<WireResponse, (u16, String)> {
        let q = req.query_value("q").ok_or((400, "missing q".to_string()))?;
        let (start, rows) = paging(req).map_err(|e| (400, e))?;
        let query = parse(q).map_err(|e| (400, e.to_string()))?;
        let hits = match &self.index {
            Some(index) => {
                let libs: BTreeMap<String, BTreeSet<String>> = self
                    .libraries
                    .iter()
                    .map(|(k, l)| (k.clone(), l.members.clone()))
                    .collect();
                evaluate(&query, index, &libs)
                    .map_err(|e| (400, e.to_string()))?
                    .hits
            }
            None => Vec::new(),
        };
        let docs = hits
            .iter()
            .skip(start)
            .take(rows)
            .map(|b| SearchDoc { bibcode: b.clone() })
            .collect();
        Ok(self.reply(
            200,
            &SearchResponse {
                response: SearchPage {
                    num_found: hits.len(),
                    start,
                    docs,
                },
            },
        ))
    }

    fn get_library(&self, key: &str, req: &WireRequest) -> Result<WireResponse, (u16, String)> {
        let lib = self
            .libraries
            .get(key)
            .ok_or((404, format!("library {key} not found")))?;
        let (start, rows) = paging(req).map_err(|e| (400, e))?;
        Ok(self.reply(
            200,
            &LibraryResponse {
                documents: lib.members.iter().skip(start).take(rows).cloned().collect(),
                metadata: LibraryMetadata {
                    id: key.to_string(),
                    name: lib.name.clone(),
                    num_documents: lib.members.len(),
                },
            },
        ))
    }

    fn change_documents(
        &mut self,
        key: &str,
        req: &WireRequest,
    ) -> Result<WireResponse, (u16, String)> {
        let body: DocumentsRequest = serde_json::from_str(req.body.as_deref().unwrap_or(""))
            .map_err(|e| (400, e.to_string()))?;
        let lib = self
            .libraries
            .get_mut(key)
            .ok_or((404, format!("library {key} not found")))?;
        let response = match body.action {
            DocumentAction::Add => DocumentsResponse {
                number_added: Some(
                    body.bibcode
                        .into_iter()
                        .filter(|b| lib.members.insert(b.clone()))
                        .count(),
                ),
                number_removed: None,
            },
            DocumentAction::Remove => DocumentsResponse {
                number_added: None,
                number_removed: Some(
                    body.bibcode
                        .iter()
                        .filter(|b| lib.members.remove(*b))
                        .count(),
                ),
            },
        };
        Ok(self.reply(200, &response))
    }
}
