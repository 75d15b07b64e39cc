//! Mock-network scenarios: users with planted ban flags and synthetic
//! tweets, stored as JSONL (a header line, then one user per line).

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use banscope_core::graph::{BanProfile, NodeId, PopulationDataset};
use chrono::{DateTime, Duration, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TweetKind {
    Thread,
    Reply,
    Retweet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimTweet {
    pub id: u64,
    pub kind: TweetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_reply_to: Option<u64>,
    pub posted: DateTime<Utc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimUser {
    pub id: NodeId,
    pub screen_name: String,
    pub bans: BanProfile,
    /// Newest first.
    pub tweets: Vec<SimTweet>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioHeader {
    pub scenario_version: u32,
    #[serde(default)]
    pub population: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scenario {
    pub header: ScenarioHeader,
    pub users: Vec<SimUser>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported scenario version {0}")]
    Version(u32),
    #[error("missing header line")]
    MissingHeader,
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

impl Scenario {
    /// Checks unique ids and screen names, newest-first tweets, referents
    /// on replies and retweets, and globally unique tweet ids.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let mut names = HashMap::new();
        let mut ids = HashMap::new();
        let mut tweet_ids = HashMap::new();
        for (i, u) in self.users.iter().enumerate() {
            if ids.insert(&u.id, i).is_some() {
                return Err(ScenarioError::Invalid(format!("duplicate user id {}", u.id)));
            }
            if u.screen_name.is_empty() || names.insert(u.screen_name.to_lowercase(), i).is_some() {
                return Err(ScenarioError::Invalid(format!("bad or duplicate screen name {:?}", u.screen_name)));
            }
            for w in u.tweets.windows(2) {
                if w[0].posted < w[1].posted {
                    return Err(ScenarioError::Invalid(format!("tweets of {} not newest-first", u.id)));
                }
            }
            for t in &u.tweets {
                if tweet_ids.insert(t.id, i).is_some() {
                    return Err(ScenarioError::Invalid(format!("duplicate tweet id {}", t.id)));
                }
                if (t.kind == TweetKind::Thread) != t.in_reply_to.is_none() {
                    return Err(ScenarioError::Invalid(format!("tweet {} referent does not match its kind", t.id)));
                }
            }
        }
        Ok(())
    }

    pub fn read(reader: impl BufRead) -> Result<Self, ScenarioError> {
        let mut lines = reader.lines().enumerate().filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
        let io_err = |source| ScenarioError::Io {
            path: "<stream>".into(),
            source,
        };
        let (i, first) = lines.next().ok_or(ScenarioError::MissingHeader)?;
        let header: ScenarioHeader = serde_json::from_str(&first.map_err(io_err)?).map_err(|e| ScenarioError::Parse {
            line: i + 1,
            message: format!("bad header: {e}"),
        })?;
        if header.scenario_version != SCENARIO_VERSION {
            return Err(ScenarioError::Version(header.scenario_version));
        }
        let mut users = Vec::new();
        for (i, line) in lines {
            let user = serde_json::from_str(&line.map_err(io_err)?).map_err(|e| ScenarioError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            users.push(user);
        }
        let s = Scenario { header, users };
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::read(BufReader::new(file))
    }

    pub fn write(&self, mut w: impl Write) -> io::Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        writeln!(w)?;
        for u in &self.users {
            serde_json::to_writer(&mut w, u)?;
            writeln!(w)?;
        }
        w.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
        let path = path.as_ref();
        let io_err = |source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        };
        let file = File::create(path).map_err(io_err)?;
        self.write(BufWriter::new(file)).map_err(io_err)
    }

    pub fn user(&self, id: &NodeId) -> Option<&SimUser> {
        self.users.iter().find(|u| &u.id == id)
    }

    pub fn count_with(&self, pred: impl Fn(&BanProfile) -> bool) -> usize {
        self.users.iter().filter(|u| pred(&u.bans)).count()
    }
}

/// Newest timestamp used by planted scenarios.
pub fn scenario_epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap()
}

/// Turns every distinct node of a dataset into a user of the mock network.
///
/// Each user posts one thread, then one reply or retweet (alternating) per
/// interaction partner, newest interaction first, pointing at the partner's
/// thread. Users without partners reply to and retweet their own thread, so
/// every user has tweets of all three kinds. A user appearing in several
/// graphs keeps the ban profile of its first occurrence and the union of its
/// partners.
pub fn plant_scenario(d: &PopulationDataset) -> Scenario {
    let mut order: Vec<(NodeId, BanProfile)> = Vec::new();
    let mut index: HashMap<NodeId, usize> = HashMap::new();
    let mut partners: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for g in &d.graphs {
        for n in &g.nodes {
            if !index.contains_key(&n.id) {
                index.insert(n.id.clone(), order.len());
                order.push((n.id.clone(), n.bans));
            }
        }
        for (a, b) in &g.edges {
            if let (Some(&a), Some(&b)) = (index.get(a), index.get(b)) {
                let list = partners.entry(a).or_default();
                if a != b && !list.contains(&b) {
                    list.push(b);
                }
            }
        }
    }
    let thread_id = |u: usize| u as u64 + 1;
    let mut next_id = order.len() as u64 + 1;
    let epoch = scenario_epoch();
    let users = order
        .into_iter()
        .enumerate()
        .map(|(u, (id, bans))| {
            let own = partners.get(&u).cloned().unwrap_or_default();
            let targets: Vec<usize> = if own.is_empty() { vec![u, u] } else { own };
            let mut tweets = Vec::with_capacity(targets.len() + 1);
            let base = epoch - Duration::minutes(u as i64 % 100_000);
            for (k, &p) in targets.iter().enumerate() {
                tweets.push(SimTweet {
                    id: next_id,
                    kind: if k % 2 == 0 { TweetKind::Reply } else { TweetKind::Retweet },
                    in_reply_to: Some(thread_id(p)),
                    posted: base - Duration::hours(k as i64),
                });
                next_id += 1;
            }
            tweets.push(SimTweet {
                id: thread_id(u),
                kind: TweetKind::Thread,
                in_reply_to: None,
                posted: base - Duration::hours(targets.len() as i64),
            });
            SimUser {
                screen_name: id.as_str().to_string(),
                id,
                bans,
                tweets,
            }
        })
        .collect();
    Scenario {
        header: ScenarioHeader {
            scenario_version: SCENARIO_VERSION,
            population: d.name.clone(),
        },
        users,
    }
}
