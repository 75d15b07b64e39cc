//! The mock OSN HTTP service.
//!
//! | endpoint                        | response                                   |
//! |---------------------------------|--------------------------------------------|
//! | `GET /typeahead?q=PREFIX`       | `{"suggestions":[screen_name...]}`         |
//! | `GET /search?q=NAME`            | `{"users":[screen_name...]}`               |
//! | `GET /user/NAME/timeline?n=K`   | `{"tweets":[{id,kind,status,...}...]}`     |
//! | `GET /tweet/ID`                 | `{"status":"ok"\|"unavailable","author"}`  |
//! | `GET /users`                    | `{"users":[screen_name...]}`               |
//!
//! `/users` lists every account in scenario order; it exists so a whole
//! scenario can be audited from its endpoint alone and plays no part in
//! any ban test.
//!
//! Unknown users and tweets answer 404 with `{"error": ...}`. Timeline
//! entries also carry `posted` and, for replies and retweets, `in_reply_to`.

use std::collections::HashMap;
use std::io;
use std::net::{SocketAddr, TcpListener};
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use tokio::sync::oneshot;

use crate::scenario::{Scenario, SimUser, TweetKind};

pub const TYPEAHEAD_LIMIT: usize = 10;
pub const SEARCH_LIMIT: usize = 20;
pub const DEFAULT_TIMELINE: usize = 20;
pub const MAX_TIMELINE: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TweetStatus {
    Ok,
    Unavailable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimelineEntry {
    pub id: u64,
    pub kind: TweetKind,
    pub status: TweetStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_reply_to: Option<u64>,
    pub posted: DateTime<Utc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    pub tweets: Vec<TimelineEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TweetLookup {
    pub status: TweetStatus,
    pub author: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Suggestions {
    pub suggestions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResults {
    pub users: Vec<String>,
}

/// Read-only lookup structures over a scenario.
pub struct MockIndex {
    users: Vec<SimUser>,
    lower: Vec<String>,
    by_name: HashMap<String, usize>,
    /// `(lowercase name, user)` sorted by name, for prefix ranges.
    sorted: Vec<(String, usize)>,
    tweets: HashMap<u64, usize>,
}

impl MockIndex {
    pub fn new(scenario: Scenario) -> Self {
        let users = scenario.users;
        let lower: Vec<String> = users.iter().map(|u| u.screen_name.to_lowercase()).collect();
        let by_name = lower.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut sorted: Vec<(String, usize)> = lower.iter().cloned().zip(0..).collect();
        sorted.sort();
        let tweets = users
            .iter()
            .enumerate()
            .flat_map(|(i, u)| u.tweets.iter().map(move |t| (t.id, i)))
            .collect();
        MockIndex {
            users,
            lower,
            by_name,
            sorted,
            tweets,
        }
    }

    /// Exact match first, then shorter names, then alphabetical.
    fn rank(&self, q: &str, mut hits: Vec<usize>, limit: usize) -> Vec<String> {
        hits.sort_by(|&a, &b| {
            let (la, lb) = (&self.lower[a], &self.lower[b]);
            (la != q).cmp(&(lb != q)).then(la.len().cmp(&lb.len())).then(la.cmp(lb))
        });
        hits.into_iter().take(limit).map(|i| self.users[i].screen_name.clone()).collect()
    }

    /// Case-insensitive prefix suggestions; suggestion-banned users are
    /// dropped after matching.
    pub fn typeahead(&self, prefix: &str) -> Suggestions {
        let q = prefix.to_lowercase();
        if q.is_empty() {
            return Suggestions { suggestions: vec![] };
        }
        let start = self.sorted.partition_point(|(n, _)| n.as_str() < q.as_str());
        let hits = self.sorted[start..]
            .iter()
            .take_while(|(n, _)| n.starts_with(&q))
            .map(|&(_, i)| i)
            .filter(|&i| !self.users[i].bans.typeahead)
            .collect();
        Suggestions {
            suggestions: self.rank(&q, hits, TYPEAHEAD_LIMIT),
        }
    }

    /// Case-insensitive substring search; search-banned users never appear.
    pub fn search(&self, query: &str) -> SearchResults {
        let q = query.to_lowercase();
        if q.is_empty() {
            return SearchResults { users: vec![] };
        }
        let hits = (0..self.users.len())
            .filter(|&i| self.lower[i].contains(&q) && !self.users[i].bans.search)
            .collect();
        SearchResults {
            users: self.rank(&q, hits, SEARCH_LIMIT),
        }
    }

    fn user(&self, name: &str) -> Option<&SimUser> {
        self.by_name.get(&name.to_lowercase()).map(|&i| &self.users[i])
    }

    /// The `n` newest tweets; every tweet of a ghost-banned user is unavailable.
    pub fn timeline(&self, name: &str, n: usize) -> Option<Timeline> {
        let u = self.user(name)?;
        let status = if u.bans.ghost { TweetStatus::Unavailable } else { TweetStatus::Ok };
        Some(Timeline {
            tweets: u
                .tweets
                .iter()
                .take(n.min(MAX_TIMELINE))
                .map(|t| TimelineEntry {
                    id: t.id,
                    kind: t.kind,
                    status: status.clone(),
                    in_reply_to: t.in_reply_to,
                    posted: t.posted,
                })
                .collect(),
        })
    }

    pub fn users(&self) -> SearchResults {
        SearchResults {
            users: self.users.iter().map(|u| u.screen_name.clone()).collect(),
        }
    }

    pub fn tweet(&self, id: u64) -> Option<TweetLookup> {
        let u = &self.users[*self.tweets.get(&id)?];
        Some(TweetLookup {
            status: if u.bans.ghost { TweetStatus::Unavailable } else { TweetStatus::Ok },
            author: u.screen_name.clone(),
        })
    }
}

type Shared = Arc<MockIndex>;

#[derive(Deserialize)]
struct QueryParam {
    #[serde(default)]
    q: String,
}

#[derive(Deserialize)]
struct CountParam {
    n: Option<usize>,
}

fn not_found(what: String) -> Response {
    (StatusCode::NOT_FOUND, Json(serde_json::json!({ "error": what }))).into_response()
}

async fn typeahead(State(ix): State<Shared>, Query(p): Query<QueryParam>) -> Json<Suggestions> {
    Json(ix.typeahead(&p.q))
}

async fn search(State(ix): State<Shared>, Query(p): Query<QueryParam>) -> Json<SearchResults> {
    Json(ix.search(&p.q))
}

async fn users(State(ix): State<Shared>) -> Json<SearchResults> {
    Json(ix.users())
}

async fn timeline(State(ix): State<Shared>, Path(name): Path<String>, Query(p): Query<CountParam>) -> Response {
    match ix.timeline(&name, p.n.unwrap_or(DEFAULT_TIMELINE)) {
        Some(t) => Json(t).into_response(),
        None => not_found(format!("unknown user {name}")),
    }
}

async fn tweet(State(ix): State<Shared>, Path(id): Path<String>) -> Response {
    match id.parse().ok().and_then(|id| ix.tweet(id)) {
        Some(t) => Json(t).into_response(),
        None => not_found(format!("unknown tweet {id}")),
    }
}

pub fn router(index: MockIndex) -> Router {
    Router::new()
        .route("/typeahead", get(typeahead))
        .route("/search", get(search))
        .route("/user/{name}/timeline", get(timeline))
        .route("/tweet/{id}", get(tweet))
        .route("/users", get(users))
        .with_state(Arc::new(index))
}

fn runtime() -> io::Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread().enable_all().build()
}

/// A mock service running on a background thread; stops when dropped.
pub struct MockServer {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<io::Result<()>>>,
}

impl MockServer {
    /// Binds `addr` (port 0 picks a free port) and starts serving.
    pub fn start(scenario: Scenario, addr: &str) -> io::Result<Self> {
        let listener = TcpListener::bind(addr)?;
        listener.set_nonblocking(true)?;
        let local = listener.local_addr()?;
        let app = router(MockIndex::new(scenario));
        let (tx, rx) = oneshot::channel::<()>();
        let rt = runtime()?;
        let thread = std::thread::spawn(move || {
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener)?;
                axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await
            })
        });
        Ok(MockServer {
            addr: local,
            shutdown: Some(tx),
            thread: Some(thread),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn stop(mut self) -> io::Result<()> {
        self.stop_inner()
    }

    fn stop_inner(&mut self) -> io::Result<()> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        match self.thread.take() {
            Some(t) => t.join().unwrap_or_else(|_| Err(io::Error::other("server thread panicked"))),
            None => Ok(()),
        }
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        let _ = self.stop_inner();
    }
}

/// Serves in the foreground until interrupted; `ready` receives the bound
/// address once the listener is up.
pub fn serve_until_interrupted(scenario: Scenario, addr: &str, ready: impl FnOnce(SocketAddr)) -> io::Result<()> {
    let listener = TcpListener::bind(addr)?;
    listener.set_nonblocking(true)?;
    ready(listener.local_addr()?);
    let app = router(MockIndex::new(scenario));
    runtime()?.block_on(async move {
        let listener = tokio::net::TcpListener::from_std(listener)?;
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
    })
}
