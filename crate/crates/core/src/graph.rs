//! Ego-graph data model and the descriptive statistics computed over
//! populations of ban-annotated ego-graphs.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::FeatureVector;

/// Pseudonymized account handle or numeric account id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

/// The three observable visibility restrictions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BanType {
    Typeahead,
    Search,
    Ghost,
}

impl BanType {
    pub const ALL: [BanType; 3] = [BanType::Typeahead, BanType::Search, BanType::Ghost];

    pub fn as_str(self) -> &'static str {
        match self {
            BanType::Typeahead => "typeahead",
            BanType::Search => "search",
            BanType::Ghost => "ghost",
        }
    }
}

impl fmt::Display for BanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-user ban flags. A user is banned when at least one flag holds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BanProfile {
    #[serde(default)]
    pub typeahead: bool,
    #[serde(default)]
    pub search: bool,
    #[serde(default)]
    pub ghost: bool,
}

impl BanProfile {
    pub const NONE: BanProfile = BanProfile {
        typeahead: false,
        search: false,
        ghost: false,
    };

    pub fn new(typeahead: bool, search: bool, ghost: bool) -> Self {
        BanProfile {
            typeahead,
            search,
            ghost,
        }
    }

    /// All eight flag combinations, in truth-table order.
    pub fn all_combinations() -> impl Iterator<Item = BanProfile> {
        (0u8..8).map(|bits| BanProfile::new(bits & 1 != 0, bits & 2 != 0, bits & 4 != 0))
    }

    pub fn banned(&self) -> bool {
        self.typeahead || self.search || self.ghost
    }

    pub fn has(&self, ty: BanType) -> bool {
        match ty {
            BanType::Typeahead => self.typeahead,
            BanType::Search => self.search,
            BanType::Ghost => self.ghost,
        }
    }

    pub fn set(&mut self, ty: BanType, value: bool) {
        match ty {
            BanType::Typeahead => self.typeahead = value,
            BanType::Search => self.search = value,
            BanType::Ghost => self.ghost = value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    #[serde(default)]
    pub bans: BanProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<FeatureVector>,
}

impl Node {
    pub fn new(id: impl Into<NodeId>, bans: BanProfile) -> Self {
        Node {
            id: id.into(),
            bans,
            features: None,
        }
    }
}

/// Interaction graph sampled around a landmark.
///
/// Edges are directed `(src, dst)` pairs meaning `src` interacted with
/// `dst`. Validity (landmark present, no dangling endpoints, no self-loops,
/// unique ids) is checked by [`crate::ingest::validate_graph`]; the
/// statistics below assume a valid graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EgoGraph {
    pub landmark: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crawl_time: Option<DateTime<Utc>>,
    pub nodes: Vec<Node>,
    #[serde(default)]
    pub edges: Vec<(NodeId, NodeId)>,
}

impl EgoGraph {
    /// A graph holding only its landmark.
    pub fn singleton(landmark: impl Into<NodeId>) -> Self {
        let landmark = landmark.into();
        EgoGraph {
            nodes: vec![Node::new(landmark.clone(), BanProfile::NONE)],
            landmark,
            crawl_time: None,
            edges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn banned_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.bans.banned()).count()
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.nodes.iter().find(|n| &n.id == id)
    }

    pub fn undirected(&self) -> UndirectedView {
        undirected_view(self)
    }
}

/// A named population of ego-graphs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PopulationDataset {
    pub name: String,
    #[serde(default)]
    pub crawl_campaign: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<DateTime<Utc>>,
    /// Free-form metadata; planted ground truth lives under `ground_truth`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
    pub graphs: Vec<EgoGraph>,
}

impl PopulationDataset {
    pub fn new(name: impl Into<String>, graphs: Vec<EgoGraph>) -> Self {
        PopulationDataset {
            name: name.into(),
            graphs,
            ..Default::default()
        }
    }

    pub fn total_nodes(&self) -> usize {
        self.graphs.iter().map(EgoGraph::len).sum()
    }

    pub fn total_banned(&self) -> usize {
        self.graphs.iter().map(EgoGraph::banned_count).sum()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("graph {0} has no nodes")]
    EmptyGraph(NodeId),
    #[error("dataset has no graphs")]
    EmptyDataset,
}

/// Compressed undirected adjacency over the node indices of an [`EgoGraph`].
///
/// Node `i` of the view is `graph.nodes[i]`. Neighbor lists are sorted and
/// free of duplicates and self-loops.
#[derive(Clone, Debug, PartialEq)]
pub struct UndirectedView {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    banned: Vec<bool>,
}

impl UndirectedView {
    /// Builds a view from index pairs; duplicate and reversed pairs collapse.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>, banned: Vec<bool>) -> Self {
        assert_eq!(banned.len(), n);
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (a, b) in pairs {
            if a == b {
                continue;
            }
            lists[a].push(b as u32);
            lists[b].push(a as u32);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut list in lists {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        UndirectedView {
            offsets,
            targets,
            banned,
        }
    }

    pub fn node_count(&self) -> usize {
        self.banned.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn is_banned(&self, v: usize) -> bool {
        self.banned[v]
    }

    pub fn banned_flags(&self) -> &[bool] {
        &self.banned
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    /// Undirected edges as `(lo, hi)` index pairs, each listed once.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .map(|&b| b as usize)
                .filter(move |&b| a < b)
                .map(move |b| (a, b))
        })
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count() == 0 {
            return 0.0;
        }
        self.targets.len() as f64 / self.node_count() as f64
    }
}

/// Collapses the directed interaction edges into a symmetric adjacency.
pub fn undirected_view(g: &EgoGraph) -> UndirectedView {
    let index: HashMap<&NodeId, usize> = g.nodes.iter().enumerate().map(|(i, n)| (&n.id, i)).collect();
    let pairs = g.edges.iter().filter_map(|(a, b)| match (index.get(a), index.get(b)) {
        (Some(&a), Some(&b)) => Some((a, b)),
        _ => None,
    });
    let banned = g.nodes.iter().map(|n| n.bans.banned()).collect();
    UndirectedView::from_pairs(g.nodes.len(), pairs, banned)
}

pub fn sb_fraction(g: &EgoGraph) -> Result<f64, StatsError> {
    if g.nodes.is_empty() {
        return Err(StatsError::EmptyGraph(g.landmark.clone()));
    }
    Ok(g.banned_count() as f64 / g.nodes.len() as f64)
}

/// Pair of group averages: `(banned, not banned)`. `None` marks an empty group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroupAverages {
    pub banned: Option<f64>,
    pub not_banned: Option<f64>,
}

#[derive(Default)]
struct MeanAcc {
    sum: f64,
    n: usize,
}

impl MeanAcc {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.n += 1;
    }

    fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

/// Average undirected degree of banned and non-banned nodes over every node
/// occurrence in the dataset.
pub fn degree_by_ban_status(d: &PopulationDataset) -> Result<GroupAverages, StatsError> {
    if d.graphs.is_empty() {
        return Err(StatsError::EmptyDataset);
    }
    let (mut banned, mut other) = (MeanAcc::default(), MeanAcc::default());
    for g in &d.graphs {
        let view = undirected_view(g);
        for v in 0..view.node_count() {
            let acc = if view.is_banned(v) { &mut banned } else { &mut other };
            acc.push(view.degree(v) as f64);
        }
    }
    Ok(GroupAverages {
        banned: banned.mean(),
        not_banned: other.mean(),
    })
}

/// Mean fraction of banned neighbors, grouped by the node's own status.
/// Isolated nodes are skipped.
pub fn neighbor_sb_fraction(d: &PopulationDataset) -> Result<GroupAverages, StatsError> {
    if d.graphs.is_empty() {
        return Err(StatsError::EmptyDataset);
    }
    let (mut banned, mut other) = (MeanAcc::default(), MeanAcc::default());
    for g in &d.graphs {
        let view = undirected_view(g);
        for v in 0..view.node_count() {
            let deg = view.degree(v);
            if deg == 0 {
                continue;
            }
            let hits = view.neighbors(v).iter().filter(|&&u| view.is_banned(u as usize)).count();
            let acc = if view.is_banned(v) { &mut banned } else { &mut other };
            acc.push(hits as f64 / deg as f64);
        }
    }
    Ok(GroupAverages {
        banned: banned.mean(),
        not_banned: other.mean(),
    })
}

/// Local clustering coefficient of node `v`; 0 when its degree is below 2.
pub fn local_clustering(view: &UndirectedView, v: usize) -> f64 {
    let nbrs = view.neighbors(v);
    let k = nbrs.len();
    if k < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &a) in nbrs.iter().enumerate() {
        let a_nbrs = view.neighbors(a as usize);
        for &b in &nbrs[i + 1..] {
            if a_nbrs.binary_search(&b).is_ok() {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (k * (k - 1)) as f64
}

pub fn clustering_avg(g: &EgoGraph) -> f64 {
    view_clustering_avg(&undirected_view(g))
}

pub fn view_clustering_avg(view: &UndirectedView) -> f64 {
    let n = view.node_count();
    if n == 0 {
        return 0.0;
    }
    (0..n).map(|v| local_clustering(view, v)).sum::<f64>() / n as f64
}

/// Per-node core number membership for `k`: true when the node survives
/// iterated deletion of nodes with degree below `k`.
pub fn k_core_members(view: &UndirectedView, k: usize) -> Vec<bool> {
    let n = view.node_count();
    let mut degree: Vec<usize> = (0..n).map(|v| view.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| degree[v] < k).collect();
    for &v in &stack {
        alive[v] = false;
    }
    while let Some(v) = stack.pop() {
        for &u in view.neighbors(v) {
            let u = u as usize;
            if alive[u] {
                degree[u] -= 1;
                if degree[u] < k {
                    alive[u] = false;
                    stack.push(u);
                }
            }
        }
    }
    alive
}

pub fn two_core_size(g: &EgoGraph) -> usize {
    view_two_core_size(&undirected_view(g))
}

pub fn view_two_core_size(view: &UndirectedView) -> usize {
    k_core_members(view, 2).into_iter().filter(|&a| a).count()
}

/// Topology summary of one population, averaged per graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopologySummary {
    pub graphs: usize,
    pub total_nodes: usize,
    pub mean_degree: f64,
    pub node_weighted_degree: f64,
    pub mean_clustering: f64,
    pub mean_two_core_size: f64,
}

pub fn topology_summary(d: &PopulationDataset) -> Result<TopologySummary, StatsError> {
    if d.graphs.is_empty() {
        return Err(StatsError::EmptyDataset);
    }
    let (mut deg, mut clust, mut core, mut degree_sum) = (0.0, 0.0, 0.0, 0usize);
    for g in &d.graphs {
        let view = undirected_view(g);
        deg += view.mean_degree();
        clust += view_clustering_avg(&view);
        core += view_two_core_size(&view) as f64;
        degree_sum += 2 * view.edge_count();
    }
    let graphs = d.graphs.len();
    let total_nodes = d.total_nodes();
    Ok(TopologySummary {
        graphs,
        total_nodes,
        mean_degree: deg / graphs as f64,
        node_weighted_degree: if total_nodes == 0 { 0.0 } else { degree_sum as f64 / total_nodes as f64 },
        mean_clustering: clust / graphs as f64,
        mean_two_core_size: core / graphs as f64,
    })
}

/// Ban-type co-occurrence over the distinct users of a dataset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cooccurrence {
    /// Users carrying each ban type, indexed like [`BanType::ALL`].
    pub totals: [usize; 3],
    /// `conditional[i][j]` = P(type j | type i); `None` when type i never occurs.
    pub conditional: [[Option<f64>; 3]; 3],
    pub banned_users: usize,
    pub distinct_users: usize,
}

impl Cooccurrence {
    pub fn total(&self, ty: BanType) -> usize {
        self.totals[ty as usize]
    }

    pub fn conditional(&self, given: BanType, target: BanType) -> Option<f64> {
        self.conditional[given as usize][target as usize]
    }
}

/// Users present in several graphs count once, with their first profile.
pub fn ban_cooccurrence(d: &PopulationDataset) -> Cooccurrence {
    let mut seen: HashSet<&NodeId> = HashSet::new();
    let mut totals = [0usize; 3];
    let mut joint = [[0usize; 3]; 3];
    let mut banned_users = 0;
    for node in d.graphs.iter().flat_map(|g| g.nodes.iter()) {
        if !seen.insert(&node.id) {
            continue;
        }
        if node.bans.banned() {
            banned_users += 1;
        }
        for (i, &a) in BanType::ALL.iter().enumerate() {
            if !node.bans.has(a) {
                continue;
            }
            totals[i] += 1;
            for (j, &b) in BanType::ALL.iter().enumerate() {
                if node.bans.has(b) {
                    joint[i][j] += 1;
                }
            }
        }
    }
    let mut conditional = [[None; 3]; 3];
    for i in 0..3 {
        if totals[i] == 0 {
            continue;
        }
        for j in 0..3 {
            conditional[i][j] = Some(joint[i][j] as f64 / totals[i] as f64);
        }
    }
    Cooccurrence {
        totals,
        conditional,
        banned_users,
        distinct_users: seen.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn graph(nodes: &[(&str, bool)], edges: &[(&str, &str)]) -> EgoGraph {
        EgoGraph {
            landmark: NodeId::from(nodes[0].0),
            crawl_time: None,
            nodes: nodes
                .iter()
                .map(|&(id, b)| Node::new(id, BanProfile::new(b, false, false)))
                .collect(),
            edges: edges.iter().map(|&(a, b)| (a.into(), b.into())).collect(),
        }
    }

    #[test]
    fn banned_is_or_of_flags() {
        for p in BanProfile::all_combinations() {
            assert_eq!(p.banned(), p.typeahead || p.search || p.ghost);
        }
        assert_eq!(BanProfile::all_combinations().filter(|p| p.banned()).count(), 7);
    }

    #[test]
    fn reciprocal_edges_collapse() {
        let g = graph(&[("a", false), ("b", false)], &[("a", "b"), ("b", "a")]);
        let v = g.undirected();
        assert_eq!(v.edge_count(), 1);
        assert_eq!(v.neighbors(0), &[1]);
        assert_eq!(v.neighbors(1), &[0]);

        let g = graph(&[("a", false), ("b", false)], &[("a", "b")]);
        assert_eq!(g.undirected().edge_count(), 1);
        assert_eq!(g.undirected().neighbors(1), &[0]);

        let g = graph(&[("a", false), ("b", false)], &[]);
        assert_eq!(g.undirected().edge_count(), 0);
    }

    #[test]
    fn sb_fraction_bounds() {
        let g = graph(&[("a", true), ("b", true)], &[]);
        assert_eq!(sb_fraction(&g).unwrap(), 1.0);
        let g = graph(&[("a", false), ("b", false)], &[]);
        assert_eq!(sb_fraction(&g).unwrap(), 0.0);
        let mut g = graph(&[("a", false)], &[]);
        g.nodes.clear();
        assert_eq!(sb_fraction(&g), Err(StatsError::EmptyGraph("a".into())));
    }

    #[test]
    fn degree_groups_on_star() {
        let g = graph(
            &[("c", true), ("x", false), ("y", false), ("z", false)],
            &[("c", "x"), ("c", "y"), ("z", "c")],
        );
        let d = PopulationDataset::new("t", vec![g]);
        let avg = degree_by_ban_status(&d).unwrap();
        assert_eq!(avg.banned, Some(3.0));
        assert_eq!(avg.not_banned, Some(1.0));
    }

    #[test]
    fn empty_group_is_absent_not_zero() {
        let g = graph(&[("a", false), ("b", false), ("c", false)], &[("a", "b"), ("b", "c")]);
        let d = PopulationDataset::new("t", vec![g]);
        let avg = degree_by_ban_status(&d).unwrap();
        assert_eq!(avg.banned, None);
        assert!((avg.not_banned.unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(degree_by_ban_status(&PopulationDataset::default()), Err(StatsError::EmptyDataset));
    }

    #[test]
    fn neighbor_fraction_pair_and_isolated() {
        let g = graph(&[("a", true), ("b", true), ("lonely", false)], &[("a", "b")]);
        let d = PopulationDataset::new("t", vec![g]);
        let f = neighbor_sb_fraction(&d).unwrap();
        assert_eq!(f.banned, Some(1.0));
        assert_eq!(f.not_banned, None);
    }

    #[test]
    fn clustering_small_cases() {
        let tri = graph(&[("a", false), ("b", false), ("c", false)], &[("a", "b"), ("b", "c"), ("c", "a")]);
        assert_eq!(clustering_avg(&tri), 1.0);
        let path = graph(&[("a", false), ("b", false), ("c", false)], &[("a", "b"), ("b", "c")]);
        assert_eq!(clustering_avg(&path), 0.0);
        // K4 minus edge c-d: a and b close 2 of 3 neighbor pairs, c and d 1 of 1.
        let k4m = graph(
            &[("a", false), ("b", false), ("c", false), ("d", false)],
            &[("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
        );
        assert!((clustering_avg(&k4m) - (1.0 + 1.0 + 2.0 / 3.0 + 2.0 / 3.0) / 4.0).abs() < 1e-12);
        assert!((clustering_avg(&k4m) - 0.8333).abs() < 1e-4);
    }

    #[test]
    fn two_core_cases() {
        let tree = graph(
            &[("a", false), ("b", false), ("c", false), ("d", false), ("e", false)],
            &[("a", "b"), ("a", "c"), ("c", "d"), ("c", "e")],
        );
        assert_eq!(two_core_size(&tree), 0);
        let tri_pendant = graph(
            &[("a", false), ("b", false), ("c", false), ("p", false)],
            &[("a", "b"), ("b", "c"), ("c", "a"), ("c", "p")],
        );
        assert_eq!(two_core_size(&tri_pendant), 3);
        let bridged = graph(
            &[("a", false), ("b", false), ("c", false), ("x", false), ("y", false), ("z", false)],
            &[("a", "b"), ("b", "c"), ("c", "a"), ("c", "x"), ("x", "y"), ("y", "z"), ("z", "x")],
        );
        assert_eq!(two_core_size(&bridged), 6);
        // Two triangles joined by a two-edge path through m: the path survives.
        let joined = graph(
            &[("a", false), ("b", false), ("c", false), ("m", false), ("x", false), ("y", false), ("z", false)],
            &[("a", "b"), ("b", "c"), ("c", "a"), ("c", "m"), ("m", "x"), ("x", "y"), ("y", "z"), ("z", "x")],
        );
        assert_eq!(two_core_size(&joined), 7);
        // With a pendant hanging off the path it is peeled away.
        let mut hang = joined.clone();
        hang.nodes.push(Node::new("q", BanProfile::NONE));
        hang.edges.push(("m".into(), "q".into()));
        assert_eq!(two_core_size(&hang), 7);
    }

    #[test]
    fn cooccurrence_all_types() {
        let mut g = graph(&[("a", true), ("b", true)], &[]);
        for n in &mut g.nodes {
            n.bans = BanProfile::new(true, true, true);
        }
        let c = ban_cooccurrence(&PopulationDataset::new("t", vec![g]));
        for i in BanType::ALL {
            for j in BanType::ALL {
                assert_eq!(c.conditional(i, j), Some(1.0));
            }
        }
        assert_eq!(c.totals, [2, 2, 2]);
    }

    #[test]
    fn cooccurrence_counts_users_once() {
        let mut g1 = graph(&[("a", false), ("b", false)], &[]);
        g1.nodes[0].bans = BanProfile::new(true, false, true);
        let g2 = g1.clone();
        let mut g2 = EgoGraph { landmark: "b".into(), ..g2 };
        g2.nodes.push(Node::new("c", BanProfile::new(true, false, false)));
        let c = ban_cooccurrence(&PopulationDataset::new("t", vec![g1, g2]));
        assert_eq!(c.total(BanType::Typeahead), 2);
        assert_eq!(c.total(BanType::Ghost), 1);
        assert_eq!(c.total(BanType::Search), 0);
        assert_eq!(c.conditional(BanType::Ghost, BanType::Typeahead), Some(1.0));
        assert_eq!(c.conditional(BanType::Typeahead, BanType::Ghost), Some(0.5));
        assert_eq!(c.conditional(BanType::Search, BanType::Ghost), None);
        assert_eq!(c.distinct_users, 3);
    }
}
