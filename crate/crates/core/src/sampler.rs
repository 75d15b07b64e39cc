//! Depth-limited snowball sampling of interaction ego-graphs.
//!
//! Starting at a landmark, nodes closer than `expand_depth` hops are
//! expanded: their most recent interaction partners join the node set.
//! Nodes at exactly `expand_depth` hops are queried only to record edges
//! towards nodes already in the set. With `fanout = 33` and
//! `expand_depth = 2` a graph holds at most `1 + 33 + 33^2 = 1123` nodes.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{BanProfile, EgoGraph, Node, NodeId, PopulationDataset};

pub const DEFAULT_FANOUT: usize = 33;
pub const DEFAULT_EXPAND_DEPTH: usize = 2;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SourceError {
    #[error("unknown user {0}")]
    UnknownUser(NodeId),
    #[error("transport failure: {0}")]
    Transport(String),
}

/// Anything that can list whom a user recently interacted with.
pub trait InteractionSource: Sync {
    /// Up to `fanout` distinct partners, newest interaction first, never
    /// containing `user` itself.
    fn neighbors_of(&self, user: &NodeId, fanout: usize) -> Result<Vec<NodeId>, SourceError>;
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SampleError {
    #[error("landmark {0} cannot be resolved: {1}")]
    UnresolvableLandmark(NodeId, SourceError),
}

/// Keeps the first `fanout` distinct partners other than `user`.
fn clean_partners(user: &NodeId, raw: Vec<NodeId>, fanout: usize) -> Vec<NodeId> {
    let mut seen = HashSet::with_capacity(raw.len());
    raw.into_iter()
        .filter(|p| p != user && seen.insert(p.clone()))
        .take(fanout)
        .collect()
}

pub fn sample_ego(source: &dyn InteractionSource, landmark: &NodeId, fanout: usize, expand_depth: usize) -> Result<EgoGraph, SampleError> {
    let first = source
        .neighbors_of(landmark, fanout)
        .map_err(|e| SampleError::UnresolvableLandmark(landmark.clone(), e))?;

    let mut order: Vec<NodeId> = vec![landmark.clone()];
    let mut index: HashMap<NodeId, usize> = HashMap::from([(landmark.clone(), 0)]);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut edge_set: HashSet<(usize, usize)> = HashSet::new();
    let mut frontier: Vec<usize> = vec![0];
    let mut fetched: HashMap<usize, Vec<NodeId>> = HashMap::from([(0, clean_partners(landmark, first, fanout))]);

    let mut add_edge = |edges: &mut Vec<(usize, usize)>, a: usize, b: usize| {
        if edge_set.insert((a, b)) {
            edges.push((a, b));
        }
    };

    for _depth in 0..expand_depth {
        let mut next = Vec::new();
        for &u in &frontier {
            let partners = match fetched.remove(&u) {
                Some(p) => p,
                None => partners_or_empty(source, &order[u], fanout),
            };
            for p in partners {
                let v = match index.get(&p) {
                    Some(&v) => v,
                    None => {
                        let v = order.len();
                        index.insert(p.clone(), v);
                        order.push(p);
                        next.push(v);
                        v
                    }
                };
                add_edge(&mut edges, u, v);
            }
        }
        frontier = next;
    }
    // Boundary nodes only contribute edges inside the collected set.
    for &u in &frontier {
        let partners = match fetched.remove(&u) {
            Some(p) => p,
            None => partners_or_empty(source, &order[u], fanout),
        };
        for p in partners {
            if let Some(&v) = index.get(&p) {
                add_edge(&mut edges, u, v);
            }
        }
    }

    Ok(EgoGraph {
        landmark: landmark.clone(),
        crawl_time: None,
        edges: edges.into_iter().map(|(a, b)| (order[a].clone(), order[b].clone())).collect(),
        nodes: order.into_iter().map(|id| Node::new(id, BanProfile::NONE)).collect(),
    })
}

fn partners_or_empty(source: &dyn InteractionSource, user: &NodeId, fanout: usize) -> Vec<NodeId> {
    // A discovered user that cannot be read contributes no interactions.
    source
        .neighbors_of(user, fanout)
        .map(|raw| clean_partners(user, raw, fanout))
        .unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrawlReport {
    pub dataset: PopulationDataset,
    /// Landmarks whose graph holds only the landmark.
    pub singletons: Vec<NodeId>,
    pub failures: Vec<(NodeId, SampleError)>,
}

/// Samples one ego-graph per landmark; failing landmarks are recorded and
/// skipped. Graph order follows `landmarks`.
pub fn crawl_population(
    source: &dyn InteractionSource,
    name: &str,
    landmarks: &[NodeId],
    fanout: usize,
    expand_depth: usize,
) -> CrawlReport {
    let results: Vec<Result<EgoGraph, SampleError>> = landmarks
        .par_iter()
        .map(|l| sample_ego(source, l, fanout, expand_depth))
        .collect();
    let mut graphs = Vec::new();
    let mut failures = Vec::new();
    for (l, r) in landmarks.iter().zip(results) {
        match r {
            Ok(g) => graphs.push(g),
            Err(e) => failures.push((l.clone(), e)),
        }
    }
    let singletons = graphs.iter().filter(|g| g.len() == 1).map(|g| g.landmark.clone()).collect();
    CrawlReport {
        dataset: PopulationDataset::new(name, graphs),
        singletons,
        failures,
    }
}

/// In-memory source over explicit, newest-first interaction lists.
#[derive(Clone, Debug, Default)]
pub struct GraphSource {
    partners: HashMap<NodeId, Vec<NodeId>>,
}

impl GraphSource {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a user; users only mentioned as partners stay unknown.
    pub fn insert(&mut self, user: impl Into<NodeId>, partners: impl IntoIterator<Item = NodeId>) {
        self.partners.insert(user.into(), partners.into_iter().collect());
    }

    pub fn from_edges(edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut partners: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for (a, b) in edges {
            partners.entry(b.clone()).or_default();
            partners.entry(a).or_default().push(b);
        }
        GraphSource { partners }
    }
}

impl InteractionSource for GraphSource {
    fn neighbors_of(&self, user: &NodeId, fanout: usize) -> Result<Vec<NodeId>, SourceError> {
        let list = self.partners.get(user).ok_or_else(|| SourceError::UnknownUser(user.clone()))?;
        Ok(clean_partners(user, list.clone(), fanout))
    }
}

/// Parameters of [`SyntheticSource`].
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticProfile {
    pub users: u64,
    /// Users are split into consecutive id blocks of this size.
    pub community_size: u64,
    /// Share of each community that interacts with only a handful of
    /// accounts (the lowest ids of the block).
    pub quiet_share: f64,
    /// Partner count range of quiet users.
    pub quiet_partners: (u32, u32),
    /// Partner count range of active users.
    pub active_partners: (u32, u32),
    /// Probability that a partner comes from the user's own community
    /// rather than a uniformly chosen one.
    pub locality: f64,
    /// Probability that a partner is drawn among active users only.
    pub active_bias: f64,
}

impl Default for SyntheticProfile {
    fn default() -> Self {
        SyntheticProfile {
            users: 1_000_000,
            community_size: 1000,
            quiet_share: 0.57,
            quiet_partners: (1, 4),
            active_partners: (25, 60),
            locality: 0.535,
            active_bias: 0.97,
        }
    }
}

/// Lazily generated interaction network: the partners of user `u<i>` are a
/// deterministic function of `(seed, i)`, so arbitrarily large sources cost
/// no memory.
#[derive(Clone, Debug)]
pub struct SyntheticSource {
    profile: SyntheticProfile,
    seed: u64,
}

impl SyntheticSource {
    pub fn new(profile: SyntheticProfile, seed: u64) -> Self {
        SyntheticSource { profile, seed }
    }

    pub fn profile(&self) -> &SyntheticProfile {
        &self.profile
    }

    pub fn user_id(i: u64) -> NodeId {
        NodeId(format!("u{i}"))
    }

    fn parse(&self, user: &NodeId) -> Option<u64> {
        user.as_str()
            .strip_prefix('u')
            .and_then(|s| s.parse().ok())
            .filter(|&i| i < self.profile.users)
    }

    fn community_size(&self) -> u64 {
        self.profile.community_size.clamp(1, self.profile.users.max(1))
    }

    fn quiet_count(&self) -> u64 {
        (self.profile.quiet_share * self.community_size() as f64).round() as u64
    }

    pub fn is_quiet(&self, i: u64) -> bool {
        i % self.community_size() < self.quiet_count()
    }

    /// Ids `[base, base + span)` of the community holding user `i`.
    fn community_of(&self, i: u64) -> (u64, u64) {
        let size = self.community_size();
        let base = i / size * size;
        (base, size.min(self.profile.users - base))
    }

    pub fn landmarks(&self, count: usize, seed: u64) -> Vec<NodeId> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(count);
        while out.len() < count.min(self.profile.users as usize) {
            let i = rng.random_range(0..self.profile.users);
            if seen.insert(i) {
                out.push(Self::user_id(i));
            }
        }
        out
    }

    fn draw_partner(&self, i: u64, rng: &mut ChaCha8Rng) -> u64 {
        let p = &self.profile;
        let c = if rng.random_bool(p.locality) {
            i
        } else {
            rng.random_range(0..p.users)
        };
        let (base, span) = self.community_of(c);
        let quiet = self.quiet_count();
        if span > quiet && rng.random_bool(p.active_bias) {
            base + rng.random_range(quiet..span)
        } else {
            base + rng.random_range(0..span)
        }
    }
}

impl InteractionSource for SyntheticSource {
    fn neighbors_of(&self, user: &NodeId, fanout: usize) -> Result<Vec<NodeId>, SourceError> {
        let i = self.parse(user).ok_or_else(|| SourceError::UnknownUser(user.clone()))?;
        let p = &self.profile;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i);
        let (lo, hi) = if self.is_quiet(i) { p.quiet_partners } else { p.active_partners };
        let want = rng.random_range(lo..=hi.max(lo)) as usize;
        let mut raw = Vec::with_capacity(want);
        let mut seen = HashSet::new();
        let mut attempts = 0;
        while raw.len() < want.min(fanout) && attempts < 4 * want + 16 {
            attempts += 1;
            let j = self.draw_partner(i, &mut rng);
            if j != i && seen.insert(j) {
                raw.push(Self::user_id(j));
            }
        }
        Ok(raw)
    }
}

/// A complete interaction graph over `2^64` users (`c<hex>`): everyone has
/// interacted with everyone, and each user's recency order is an
/// independent pseudo-random permutation. Sampling never runs out of
/// partners, so ego-graphs reach the maximal size.
#[derive(Clone, Copy, Debug)]
pub struct CompleteSource {
    seed: u64,
}

impl CompleteSource {
    pub fn new(seed: u64) -> Self {
        CompleteSource { seed }
    }

    pub fn user_id(i: u64) -> NodeId {
        NodeId(format!("c{i:016x}"))
    }

    fn parse(user: &NodeId) -> Option<u64> {
        user.as_str().strip_prefix('c').and_then(|h| u64::from_str_radix(h, 16).ok())
    }
}

impl InteractionSource for CompleteSource {
    fn neighbors_of(&self, user: &NodeId, fanout: usize) -> Result<Vec<NodeId>, SourceError> {
        let i = Self::parse(user).ok_or_else(|| SourceError::UnknownUser(user.clone()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i);
        let mut seen = HashSet::with_capacity(fanout);
        let mut out = Vec::with_capacity(fanout);
        while out.len() < fanout {
            let j: u64 = rng.random();
            if j != i && seen.insert(j) {
                out.push(Self::user_id(j));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> NodeId {
        NodeId::from(s)
    }

    #[test]
    fn star_source() {
        let mut src = GraphSource::new();
        let leaves: Vec<NodeId> = (0..33).map(|i| NodeId(format!("leaf{i}"))).collect();
        src.insert("hub", leaves.clone());
        for l in &leaves {
            src.insert(l.clone(), []);
        }
        let g = sample_ego(&src, &id("hub"), 33, 2).unwrap();
        assert_eq!(g.len(), 34);
        assert_eq!(g.edges.len(), 33);
    }

    #[test]
    fn unknown_landmark_is_an_error() {
        let src = GraphSource::new();
        assert!(matches!(sample_ego(&src, &id("nobody"), 33, 2), Err(SampleError::UnresolvableLandmark(..))));
    }

    #[test]
    fn depth_two_neighbors_only_add_edges() {
        // a -> b -> c -> {a, d}: c is at depth 2, so d is never added but c->a is kept.
        let src = GraphSource::from_edges([
            (id("a"), id("b")),
            (id("b"), id("c")),
            (id("c"), id("a")),
            (id("c"), id("d")),
        ]);
        let g = sample_ego(&src, &id("a"), 33, 2).unwrap();
        let names: Vec<&str> = g.nodes.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
        assert_eq!(g.edges, vec![(id("a"), id("b")), (id("b"), id("c")), (id("c"), id("a"))]);
    }

    #[test]
    fn fanout_keeps_newest_distinct_partners() {
        let mut src = GraphSource::new();
        src.insert("a", [id("b"), id("b"), id("a"), id("c"), id("d")]);
        for u in ["b", "c", "d"] {
            src.insert(u, []);
        }
        let g = sample_ego(&src, &id("a"), 2, 1).unwrap();
        let names: Vec<&str> = g.nodes.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
    }

    #[test]
    fn zero_depth_is_landmark_only() {
        let src = GraphSource::from_edges([(id("a"), id("b"))]);
        let g = sample_ego(&src, &id("a"), 33, 0).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn crawl_flags_singletons_and_failures() {
        let mut src = GraphSource::from_edges([(id("a"), id("b")), (id("c"), id("a"))]);
        src.insert("lonely", []);
        let report = crawl_population(&src, "T", &[id("a"), id("lonely"), id("missing")], 33, 2);
        assert_eq!(report.dataset.graphs.len(), 2);
        assert_eq!(report.singletons, vec![id("lonely")]);
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].0, id("missing"));
    }

    #[test]
    fn synthetic_source_is_deterministic_and_clean() {
        let src = SyntheticSource::new(SyntheticProfile::default(), 11);
        for i in [0u64, 5, 999_999] {
            let u = SyntheticSource::user_id(i);
            let a = src.neighbors_of(&u, 33).unwrap();
            assert_eq!(a, src.neighbors_of(&u, 33).unwrap());
            assert!(a.len() <= 33);
            assert!(!a.contains(&u));
            let distinct: HashSet<_> = a.iter().collect();
            assert_eq!(distinct.len(), a.len());
        }
        assert!(src.neighbors_of(&id("u1000000"), 33).is_err());
        assert!(src.neighbors_of(&id("bob"), 33).is_err());
    }
}
