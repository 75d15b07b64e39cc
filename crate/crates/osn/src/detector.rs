//! Black-box ban tests against any service speaking the mock's HTTP contract.
//!
//! Each test records the request it made and a SHA-256 digest of the raw
//! response that decided the verdict, so a verdict can be re-checked by
//! replaying the request. Transport failures are errors, never verdicts.

use std::time::Duration;

use banscope_core::graph::BanProfile;
use chrono::{DateTime, TimeZone, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::client::{digest, encode, Fetched, HttpClient};
use crate::server::{SearchResults, Suggestions, Timeline, TweetLookup, TweetStatus, MAX_TIMELINE};

/// Recent tweets inspected by the ghost test unless a full scan is requested.
pub const DEFAULT_GHOST_SAMPLE: usize = 33;

pub fn default_since() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2019, 1, 1, 0, 0, 0).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BanTest {
    Typeahead,
    Search,
    Ghost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BanEvidence {
    pub test: BanTest,
    pub request: String,
    pub response_digest: String,
    pub verdict: bool,
}

impl BanEvidence {
    fn new(test: BanTest, resp: &Fetched, verdict: bool) -> Self {
        BanEvidence {
            test,
            request: resp.request.clone(),
            response_digest: digest(&resp.body),
            verdict,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GhostStatus {
    Verdict(bool),
    /// No tweet since the cut-off; the user is ignored rather than judged.
    Inactive,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DetectError {
    #[error("transport failure on {request}: {message}")]
    Transport { request: String, message: String },
    #[error("unexpected response to {request}: {message}")]
    Protocol { request: String, message: String },
    #[error("unknown user {0}")]
    UnknownUser(String),
}

impl DetectError {
    /// Transport failures may succeed on retry; the others will not.
    pub fn is_retryable(&self) -> bool {
        matches!(self, DetectError::Transport { .. })
    }
}

#[derive(Clone, Debug)]
pub struct DetectorConfig {
    pub since: DateTime<Utc>,
    pub ghost_sample: usize,
    pub full_scan: bool,
    pub timeout: Duration,
    pub retries: u32,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            since: default_since(),
            ghost_sample: DEFAULT_GHOST_SAMPLE,
            full_scan: false,
            timeout: Duration::from_secs(10),
            retries: 1,
        }
    }
}

/// Outcome of all three tests for one user. A test that hit an error has
/// no verdict and the report is marked incomplete.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub user: String,
    pub typeahead: Option<bool>,
    pub search: Option<bool>,
    pub ghost: Option<GhostStatus>,
    pub complete: bool,
    /// Set when some test could not reach the service.
    #[serde(default)]
    pub transport_error: bool,
    pub evidence: Vec<BanEvidence>,
    pub errors: Vec<String>,
}

impl DetectionReport {
    /// Missing verdicts count as "not banned".
    pub fn profile(&self) -> BanProfile {
        BanProfile::new(
            self.typeahead.unwrap_or(false),
            self.search.unwrap_or(false),
            self.ghost == Some(GhostStatus::Verdict(true)),
        )
    }

    pub fn banned(&self) -> bool {
        self.profile().banned()
    }

    pub fn inactive(&self) -> bool {
        self.ghost == Some(GhostStatus::Inactive)
    }
}

pub struct Detector {
    client: HttpClient,
    config: DetectorConfig,
}

impl Detector {
    pub fn new(endpoint: &str, config: DetectorConfig) -> Self {
        Detector {
            client: HttpClient::new(endpoint, config.timeout, config.retries),
            config,
        }
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    fn fetch(&self, request: String) -> Result<Fetched, DetectError> {
        self.client
            .get(&request)
            .map_err(|message| DetectError::Transport { request, message })
    }

    fn parse<T: serde::de::DeserializeOwned>(resp: &Fetched) -> Result<T, DetectError> {
        if resp.status != 200 {
            return Err(DetectError::Protocol {
                request: resp.request.clone(),
                message: format!("status {}", resp.status),
            });
        }
        serde_json::from_slice(&resp.body).map_err(|e| DetectError::Protocol {
            request: resp.request.clone(),
            message: e.to_string(),
        })
    }

    /// Banned iff the user is missing from the suggestions for its own full
    /// screen name.
    pub fn test_typeahead(&self, user: &str) -> Result<(bool, BanEvidence), DetectError> {
        let resp = self.fetch(format!("/typeahead?q={}", encode(user)))?;
        let s: Suggestions = Self::parse(&resp)?;
        let verdict = !s.suggestions.iter().any(|n| n.eq_ignore_ascii_case(user));
        Ok((verdict, BanEvidence::new(BanTest::Typeahead, &resp, verdict)))
    }

    /// Banned iff an exact-name search does not return the user.
    pub fn test_search(&self, user: &str) -> Result<(bool, BanEvidence), DetectError> {
        let resp = self.fetch(format!("/search?q={}", encode(user)))?;
        let s: SearchResults = Self::parse(&resp)?;
        let verdict = !s.users.iter().any(|n| n.eq_ignore_ascii_case(user));
        Ok((verdict, BanEvidence::new(BanTest::Search, &resp, verdict)))
    }

    /// Banned iff a recent tweet resolves as unavailable while still being
    /// attributed to the user's (resolvable) account.
    pub fn test_ghost(&self, user: &str) -> Result<(GhostStatus, BanEvidence), DetectError> {
        let n = if self.config.full_scan { MAX_TIMELINE } else { self.config.ghost_sample };
        let resp = self.fetch(format!("/user/{}/timeline?n={n}", encode(user)))?;
        if resp.status == 404 {
            return Err(DetectError::UnknownUser(user.to_string()));
        }
        let timeline: Timeline = Self::parse(&resp)?;
        let recent: Vec<_> = timeline.tweets.iter().filter(|t| t.posted >= self.config.since).collect();
        if recent.is_empty() {
            return Ok((GhostStatus::Inactive, BanEvidence::new(BanTest::Ghost, &resp, false)));
        }
        for t in recent.iter().filter(|t| t.status == TweetStatus::Unavailable) {
            let lookup = self.fetch(format!("/tweet/{}", t.id))?;
            let l: TweetLookup = Self::parse(&lookup)?;
            if l.status == TweetStatus::Unavailable && l.author.eq_ignore_ascii_case(user) {
                return Ok((GhostStatus::Verdict(true), BanEvidence::new(BanTest::Ghost, &lookup, true)));
            }
        }
        Ok((GhostStatus::Verdict(false), BanEvidence::new(BanTest::Ghost, &resp, false)))
    }

    /// Runs the three tests in order; errors are recorded, not propagated.
    pub fn detect(&self, user: &str) -> DetectionReport {
        let mut report = DetectionReport {
            user: user.to_string(),
            typeahead: None,
            search: None,
            ghost: None,
            complete: true,
            transport_error: false,
            evidence: Vec::with_capacity(3),
            errors: Vec::new(),
        };
        let note = |r: &mut DetectionReport, e: DetectError| {
            r.complete = false;
            r.transport_error |= e.is_retryable();
            r.errors.push(e.to_string());
        };
        match self.test_typeahead(user) {
            Ok((v, ev)) => {
                report.typeahead = Some(v);
                report.evidence.push(ev);
            }
            Err(e) => note(&mut report, e),
        }
        match self.test_search(user) {
            Ok((v, ev)) => {
                report.search = Some(v);
                report.evidence.push(ev);
            }
            Err(e) => note(&mut report, e),
        }
        match self.test_ghost(user) {
            Ok((v, ev)) => {
                report.ghost = Some(v);
                report.evidence.push(ev);
            }
            Err(e) => note(&mut report, e),
        }
        report
    }

    /// Every account the service lists under `/users` (mock services only).
    pub fn list_users(&self) -> Result<Vec<String>, DetectError> {
        let resp = self.fetch("/users".to_string())?;
        Ok(Self::parse::<SearchResults>(&resp)?.users)
    }

    /// Users are tested in parallel; reports come back in input order.
    pub fn detect_all(&self, users: &[String]) -> Vec<DetectionReport> {
        users.par_iter().map(|u| self.detect(u)).collect()
    }
}
