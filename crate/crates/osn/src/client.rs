//! Minimal blocking HTTP client shared by the detector and the mock source.

use std::time::Duration;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use sha2::{Digest, Sha256};
use ureq::Agent;

const COMPONENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.').remove(b'~');

pub fn encode(s: &str) -> String {
    utf8_percent_encode(s, COMPONENT).to_string()
}

/// Hex SHA-256 of a raw response body.
pub fn digest(body: &[u8]) -> String {
    hex::encode(Sha256::digest(body))
}

#[derive(Clone, Debug)]
pub struct Fetched {
    /// Path and query, as sent.
    pub request: String,
    pub status: u16,
    pub body: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct HttpClient {
    base: String,
    agent: Agent,
    retries: u32,
}

impl HttpClient {
    pub fn new(endpoint: &str, timeout: Duration, retries: u32) -> Self {
        let agent: Agent = Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpClient {
            base: endpoint.trim_end_matches('/').to_string(),
            agent,
            retries,
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.base
    }

    /// GETs `request` (path plus query). Any HTTP status is a response;
    /// only failures to obtain one are errors.
    pub fn get(&self, request: &str) -> Result<Fetched, String> {
        let url = format!("{}{}", self.base, request);
        let mut last = String::new();
        for _ in 0..=self.retries {
            match self.agent.get(&url).call() {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    match resp.body_mut().read_to_vec() {
                        Ok(body) => {
                            return Ok(Fetched {
                                request: request.to_string(),
                                status,
                                body,
                            })
                        }
                        Err(e) => last = e.to_string(),
                    }
                }
                Err(e) => last = e.to_string(),
            }
        }
        Err(last)
    }
}
