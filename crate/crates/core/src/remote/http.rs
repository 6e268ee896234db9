use std::time::Duration;

use ureq::Agent;

use super::wire::{Method, Transport, TransportError, WireRequest, WireResponse};

/// [`Transport`] over HTTP(S) using `ureq`.
pub struct HttpTransport {
    base_url: String,
    agent: Agent,
}

impl HttpTransport {
    pub fn new(base_url: &str, timeout: Duration) -> Self {
        let agent: Agent = Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpTransport {
            base_url: base_url.trim_end_matches('/').to_string(),
            agent,
        }
    }
}

impl Transport for HttpTransport {
    fn send(&self, request: &WireRequest) -> Result<WireResponse, TransportError> {
        let url = format!("{}{}", self.base_url, request.path);
        let query = request.query.iter().map(|(k, v)| (k.as_str(), v.as_str()));
        let result = match request.method {
            Method::Get => {
                let mut r = self.agent.get(&url).query_pairs(query);
                for (k, v) in &request.headers {
                    r = r.header(k.as_str(), v.as_str());
                }
                r.call()
            }
            Method::Post => {
                let mut r = self
                    .agent
                    .post(&url)
                    .query_pairs(query)
                    .header("Content-Type", "application/json");
                for (k, v) in &request.headers {
                    r = r.header(k.as_str(), v.as_str());
                }
                r.send(request.body.as_deref().unwrap_or(""))
            }
        };
        let mut response = result.map_err(|e| TransportError(e.to_string()))?;
        let headers = response
            .headers()
            .iter()
            .filter_map(|(k, v)| Some((k.as_str().to_string(), v.to_str().ok()?.to_string())))
            .collect();
        let status = response.status().as_u16();
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| TransportError(e.to_string()))?;
        Ok(WireResponse {
            status,
            headers,
            body,
        })
    }
}
