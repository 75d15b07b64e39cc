//! An [`InteractionSource`] that reads partners off a service's timelines.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Duration;

use banscope_core::graph::NodeId;
use banscope_core::sampler::{InteractionSource, SourceError};

use crate::client::{encode, HttpClient};
use crate::server::{Timeline, TweetLookup, MAX_TIMELINE};

/// Partners are the authors of the tweets a user replied to or retweeted,
/// newest first, over its most recent tweets. Referent authors are cached.
pub struct MockSource {
    client: HttpClient,
    authors: Mutex<HashMap<u64, Option<String>>>,
    depth: usize,
}

impl MockSource {
    pub fn new(endpoint: &str) -> Self {
        MockSource {
            client: HttpClient::new(endpoint, Duration::from_secs(10), 1),
            authors: Mutex::new(HashMap::new()),
            depth: MAX_TIMELINE,
        }
    }

    fn author_of(&self, tweet: u64) -> Result<Option<String>, SourceError> {
        if let Some(a) = self.authors.lock().unwrap().get(&tweet) {
            return Ok(a.clone());
        }
        let resp = self.client.get(&format!("/tweet/{tweet}")).map_err(SourceError::Transport)?;
        let author = match resp.status {
            200 => Some(
                serde_json::from_slice::<TweetLookup>(&resp.body)
                    .map_err(|e| SourceError::Transport(e.to_string()))?
                    .author,
            ),
            404 => None,
            s => return Err(SourceError::Transport(format!("status {s} for {}", resp.request))),
        };
        self.authors.lock().unwrap().insert(tweet, author.clone());
        Ok(author)
    }
}

impl InteractionSource for MockSource {
    fn neighbors_of(&self, user: &NodeId, fanout: usize) -> Result<Vec<NodeId>, SourceError> {
        let resp = self
            .client
            .get(&format!("/user/{}/timeline?n={}", encode(user.as_str()), self.depth))
            .map_err(SourceError::Transport)?;
        match resp.status {
            200 => {}
            404 => return Err(SourceError::UnknownUser(user.clone())),
            s => return Err(SourceError::Transport(format!("status {s} for {}", resp.request))),
        }
        let timeline: Timeline = serde_json::from_slice(&resp.body).map_err(|e| SourceError::Transport(e.to_string()))?;
        let mut out: Vec<NodeId> = Vec::new();
        for t in &timeline.tweets {
            if out.len() >= fanout {
                break;
            }
            let Some(target) = t.in_reply_to else { continue };
            if let Some(author) = self.author_of(target)? {
                let id = NodeId::from(author.as_str());
                if &id != user && !out.contains(&id) {
                    out.push(id);
                }
            }
        }
        Ok(out)
    }
}
