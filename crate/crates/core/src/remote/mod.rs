//! Client for an ADS-compatible remote service: paged search, library
//! pull/push and a disjointness check, with quota tracking and retries.
//!
//! All traffic goes through the narrow [`Transport`] trait. [`HttpTransport`]
//! speaks HTTP via `ureq`; [`FakeAds`] implements the same wire contract in
//! process so the client can be exercised without credentials.

mod client;
mod fake;
mod fake_server;
mod http;
pub mod wire;

use std::fmt;
use std::time::Duration;

use chrono::{DateTime, Utc};
use thiserror::Error;

pub use client::RemoteClient;
pub use fake::{FakeAds, FakeCounters};
pub use fake_server::FakeServer;
pub use http::HttpTransport;
pub use wire::{Method, Transport, TransportError, WireRequest, WireResponse};

/// Environment variable holding the bearer token.
pub const TOKEN_ENV: &str = "ADS_API_TOKEN";
pub const DEFAULT_BASE_URL: &str = "https://api.adsabs.harvard.edu";
pub const DEFAULT_PAGE_SIZE: usize = 200;
pub const MAX_PAGE_SIZE: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RemoteError {
    #[error("remote rejected the credentials")]
    AuthFailure,
    #[error("remote quota exhausted until {reset_at}")]
    QuotaExhausted { reset_at: DateTime<Utc> },
    #[error("remote request failed after {attempts} attempts: {reason}")]
    TransientFailure { attempts: u32, reason: String },
    #[error("unknown remote library {0}")]
    UnknownRemoteLibrary(String),
    #[error("invalid remote configuration: {0}")]
    InvalidConfig(String),
    #[error("unexpected remote response: {0}")]
    Protocol(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct RemoteConfig {
    pub base_url: String,
    pub auth_token: Option<String>,
    pub page_size: usize,
    pub max_retries: u32,
    /// Delay before retry n (1-based) is `backoff[min(n, len) - 1]`.
    pub backoff: Vec<Duration>,
    /// Cached search results younger than this are reused.
    pub cache_ttl: Duration,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            base_url: DEFAULT_BASE_URL.into(),
            auth_token: None,
            page_size: DEFAULT_PAGE_SIZE,
            max_retries: 3,
            backoff: vec![
                Duration::from_secs(1),
                Duration::from_secs(2),
                Duration::from_secs(4),
            ],
            cache_ttl: Duration::from_secs(24 * 3600),
        }
    }
}

impl RemoteConfig {
    /// Default settings with the token taken from [`TOKEN_ENV`].
    pub fn from_env() -> Self {
        RemoteConfig {
            auth_token: std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty()),
            ..RemoteConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), RemoteError> {
        if !(1..=MAX_PAGE_SIZE).contains(&self.page_size) {
            return Err(RemoteError::InvalidConfig(format!(
                "page size {} outside 1..={MAX_PAGE_SIZE}",
                self.page_size
            )));
        }
        if self.base_url.is_empty() {
            return Err(RemoteError::InvalidConfig("empty base URL".into()));
        }
        Ok(())
    }

    pub(crate) fn backoff_for(&self, retry: u32) -> Duration {
        match self.backoff.len() {
            0 => Duration::ZERO,
            n => self.backoff[(retry as usize).clamp(1, n) - 1],
        }
    }
}

impl fmt::Debug for RemoteConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RemoteConfig")
            .field("base_url", &self.base_url)
            .field(
                "auth_token",
                &self.auth_token.as_ref().map(|_| "<redacted>"),
            )
            .field("page_size", &self.page_size)
            .field("max_retries", &self.max_retries)
            .field("backoff", &self.backoff)
            .field("cache_ttl", &self.cache_ttl)
            .finish()
    }
}

/// A payload plus the quota state reported with the last response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteOutcome<T> {
    pub payload: T,
    pub quota_remaining: Option<u64>,
    pub quota_reset_at: Option<DateTime<Utc>>,
}
