//! Synthetic topologies: population-like ego-graphs sampled from a lazy
//! interaction source, and random regular graphs.

use std::collections::{HashMap, HashSet};

use rand::Rng;

use crate::graph::{BanProfile, EgoGraph, Node, NodeId, PopulationDataset, UndirectedView};
use crate::ingest::{filter_suitable, is_boolean_feature, FeatureValue, FeatureVector, CANONICAL_FEATURES};
use crate::rng::aux_rng;
use crate::sampler::{crawl_population, SyntheticProfile, SyntheticSource, DEFAULT_EXPAND_DEPTH, DEFAULT_FANOUT};

/// Source parameters whose ego-graphs resemble a randomly drawn user
/// population: a bimodal size distribution (few-contact landmarks give
/// small graphs, active ones near-maximal graphs), mean size around 440,
/// node-weighted undirected degree around 5.6 and clustering around 0.2.
pub fn random_population_profile() -> SyntheticProfile {
    SyntheticProfile::default()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopologyConfig {
    pub graphs: usize,
    pub profile: SyntheticProfile,
    pub fanout: usize,
    pub expand_depth: usize,
    pub seed: u64,
}

impl TopologyConfig {
    pub fn random_population(graphs: usize, seed: u64) -> Self {
        TopologyConfig {
            graphs,
            profile: random_population_profile(),
            fanout: DEFAULT_FANOUT,
            expand_depth: DEFAULT_EXPAND_DEPTH,
            seed,
        }
    }
}

/// Crawls `cfg.graphs` non-singleton ego-graphs from distinct landmarks.
/// All nodes are unbanned; use `epidemic::plant_synthetic` to assign bans.
pub fn synthetic_topologies(cfg: &TopologyConfig) -> PopulationDataset {
    let source = SyntheticSource::new(cfg.profile.clone(), cfg.seed);
    let mut graphs = Vec::with_capacity(cfg.graphs);
    let mut used = HashSet::new();
    let mut round = 0u64;
    while graphs.len() < cfg.graphs && round < 64 {
        let landmarks: Vec<NodeId> = source
            .landmarks(cfg.graphs - graphs.len(), cfg.seed.wrapping_add(round))
            .into_iter()
            .filter(|l| used.insert(l.clone()))
            .collect();
        round += 1;
        let report = crawl_population(&source, "synthetic", &landmarks, cfg.fanout, cfg.expand_depth);
        let (kept, _) = filter_suitable(&report.dataset, 2);
        graphs.extend(kept.graphs);
    }
    graphs.truncate(cfg.graphs);
    let mut d = PopulationDataset::new("SYNTHETIC", graphs);
    d.crawl_campaign = "synthetic".into();
    d.metadata.insert(
        "topology".into(),
        serde_json::json!({
            "generator": "community-source snowball",
            "seed": cfg.seed,
            "fanout": cfg.fanout,
            "expand_depth": cfg.expand_depth,
            "users": cfg.profile.users,
            "quiet_share": cfg.profile.quiet_share,
            "locality": cfg.profile.locality,
            "community_size": cfg.profile.community_size,
            "active_bias": cfg.profile.active_bias,
        }),
    );
    d
}

/// Attaches toy profile features to every node. Each distinct user gets one
/// vector, drawn in first-occurrence order: counts are log-uniform up to
/// 10^5 and booleans fair coins, except that banned users draw
/// `media_count` and `friends_count` from a range shifted up by a factor
/// of `1 + shift`. With `shift = 0` features carry no label information.
pub fn attach_synthetic_features(d: &PopulationDataset, shift: f64, seed: u64) -> PopulationDataset {
    let mut rng = aux_rng(seed, 0xfea7);
    let mut drawn: HashMap<NodeId, FeatureVector> = HashMap::new();
    let mut out = d.clone();
    for node in out.graphs.iter_mut().flat_map(|g| g.nodes.iter_mut()) {
        let banned = node.bans.banned();
        let features = drawn
            .entry(node.id.clone())
            .or_insert_with(|| {
                CANONICAL_FEATURES
                    .iter()
                    .map(|&name| {
                        let v = if is_boolean_feature(name) {
                            FeatureValue::Bool(rng.random_bool(0.5))
                        } else {
                            let scale = if banned && (name == "media_count" || name == "friends_count") { 1.0 + shift } else { 1.0 };
                            let x = (rng.random::<f64>() * 1e5f64.ln()).exp() * scale;
                            FeatureValue::count(x as u64)
                        };
                        (name.to_string(), v)
                    })
                    .collect()
            })
            .clone();
        node.features = Some(features);
    }
    out
}

/// Uniform-ish random simple `k`-regular graph on `n` nodes, built by
/// random pairing of unmatched stubs with restarts when stuck.
///
/// Panics when `n * k` is odd or `k >= n`.
pub fn random_regular(n: usize, k: usize, seed: u64) -> UndirectedView {
    assert!(k < n && (n * k).is_multiple_of(2), "no simple {k}-regular graph on {n} nodes");
    let mut rng = aux_rng(seed, 0x4e6);
    'attempt: loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
        let mut edges: HashSet<(usize, usize)> = HashSet::with_capacity(n * k / 2);
        while !stubs.is_empty() {
            let mut found = false;
            for _ in 0..100 {
                let i = rng.random_range(0..stubs.len());
                let j = rng.random_range(0..stubs.len());
                let (a, b) = (stubs[i], stubs[j]);
                let key = (a.min(b), a.max(b));
                if i != j && a != b && !edges.contains(&key) {
                    edges.insert(key);
                    let (hi, lo) = (i.max(j), i.min(j));
                    stubs.swap_remove(hi);
                    stubs.swap_remove(lo);
                    found = true;
                    break;
                }
            }
            if !found {
                continue 'attempt;
            }
        }
        let mut pairs: Vec<(usize, usize)> = edges.into_iter().collect();
        pairs.sort_unstable();
        return UndirectedView::from_pairs(n, pairs, vec![false; n]);
    }
}

/// Wraps an undirected view as an ego-graph with nodes `n0..`, landmark `n0`.
pub fn view_to_graph(view: &UndirectedView, name: &str) -> EgoGraph {
    let id = |v: usize| NodeId(format!("{name}{v}"));
    EgoGraph {
        landmark: id(0),
        crawl_time: None,
        nodes: (0..view.node_count()).map(|v| Node::new(id(v), BanProfile::NONE)).collect(),
        edges: view.edges().map(|(a, b)| (id(a), id(b))).collect(),
    }
}
