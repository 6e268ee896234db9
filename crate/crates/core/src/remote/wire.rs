//! Wire contract (version 1) shared by the client, the HTTP transport and
//! the in-process fake.
//!
//! | request | response body |
//! |---|---|
//! | `GET /v1/search/query?q=&fl=bibcode&sort=&rows=&start=` | `{"response":{"numFound":N,"start":S,"docs":[{"bibcode":..}]}}` |
//! | `GET /v1/biblib/libraries/{key}?rows=&start=` | `{"documents":[..],"metadata":{"id":..,"name":..,"num_documents":N}}` |
//! | `POST /v1/biblib/documents/{key}` `{"bibcode":[..],"action":"add"\|"remove"}` | `{"number_added":n}` or `{"number_removed":n}` |
//!
//! Every response carries `X-RateLimit-Limit`, `X-RateLimit-Remaining` and
//! `X-RateLimit-Reset` (Unix seconds). Status 401 means bad credentials, 404
//! an unknown library, 429 an exhausted quota, 5xx a transient failure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SEARCH_PATH: &str = "/v1/search/query";
pub const LIBRARY_PATH: &str = "/v1/biblib/libraries/";
pub const DOCUMENTS_PATH: &str = "/v1/biblib/documents/";
pub const SEARCH_SORT: &str = "date desc,bibcode desc";

pub const HEADER_LIMIT: &str = "X-RateLimit-Limit";
pub const HEADER_REMAINING: &str = "X-RateLimit-Remaining";
pub const HEADER_RESET: &str = "X-RateLimit-Reset";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Get,
    Post,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireRequest {
    pub method: Method,
    pub path: String,
    pub query: Vec<(String, String)>,
    pub headers: Vec<(String, String)>,
    pub body: Option<String>,
}

impl WireRequest {
    pub fn get(path: impl Into<String>) -> Self {
        WireRequest {
            method: Method::Get,
            path: path.into(),
            query: Vec::new(),
            headers: Vec::new(),
            body: None,
        }
    }

    pub fn post(path: impl Into<String>, body: String) -> Self {
        WireRequest {
            method: Method::Post,
            body: Some(body),
            ..WireRequest::get(path)
        }
    }

    pub fn param(mut self, name: &str, value: impl ToString) -> Self {
        self.query.push((name.into(), value.to_string()));
        self
    }

    pub fn query_value(&self, name: &str) -> Option<&str> {
        self.query
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        find_header(&self.headers, name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireResponse {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: String,
}

impl WireResponse {
    pub fn header(&self, name: &str) -> Option<&str> {
        find_header(&self.headers, name)
    }
}

fn find_header<'a>(headers: &'a [(String, String)], name: &str) -> Option<&'a str> {
    headers
        .iter()
        .find(|(k, _)| k.eq_ignore_ascii_case(name))
        .map(|(_, v)| v.as_str())
}

/// Connection-level failure (no HTTP status); treated as transient.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("transport error: {0}")]
pub struct TransportError(pub String);

/// Sends one request and returns the raw response.
pub trait Transport: Send + Sync {
    fn send(&self, request: &WireRequest) -> Result<WireResponse, TransportError>;
}

impl<T: Transport + ?Sized> Transport for std::sync::Arc<T> {
    fn send(&self, request: &WireRequest) -> Result<WireResponse, TransportError> {
        (**self).send(request)
    }
}

impl<T: Transport + ?Sized> Transport for &T {
    fn send(&self, request: &WireRequest) -> Result<WireResponse, TransportError> {
        (**self).send(request)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchDoc {
    pub bibcode: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchPage {
    #[serde(rename = "numFound")]
    pub num_found: usize,
    pub start: usize,
    pub docs: Vec<SearchDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub response: SearchPage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LibraryMetadata {
    pub id: String,
    pub name: String,
    pub num_documents: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LibraryResponse {
    pub documents: Vec<String>,
    pub metadata: LibraryMetadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentAction {
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentsRequest {
    pub bibcode: Vec<String>,
    pub action: DocumentAction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentsResponse {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub number_added: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub number_removed: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_bodies() {
        let page = SearchResponse {
            response: SearchPage {
                num_found: 2,
                start: 0,
                docs: vec![SearchDoc {
                    bibcode: "2020arXiv201104003L".into(),
                }],
            },
        };
        assert_eq!(
            serde_json::to_string(&page).unwrap(),
            r#"{"response":{"numFound":2,"start":0,"docs":[{"bibcode":"2020arXiv201104003L"}]}}"#
        );
        let req = DocumentsRequest {
            bibcode: vec!["a".into()],
            action: DocumentAction::Remove,
        };
        assert_eq!(
            serde_json::to_string(&req).unwrap(),
            r#"{"bibcode":["a"],"action":"remove"}"#
        );
        let resp = DocumentsResponse {
            number_added: Some(3),
            number_removed: None,
        };
        assert_eq!(
            serde_json::to_string(&resp).unwrap(),
            r#"{"number_added":3}"#
        );
    }

    #[test]
    fn headers_are_case_insensitive() {
        let r = WireResponse {
            status: 200,
            headers: vec![("x-ratelimit-remaining".into(), "7".into())],
            body: String::new(),
        };
        assert_eq!(r.header(HEADER_REMAINING), Some("7"));
    }
}
