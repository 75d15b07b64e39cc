//! One-step SI contamination on ego-graphs, its analytic approximation on
//! k-regular graphs, ridge fitting against an observed ban rate and the
//! neighbor-conditional selection of the contamination probability.
//!
//! In `SI(p0, beta)` every node is initially banned with probability `p0`;
//! each initially banned node then bans each of its neighbors independently
//! with probability `beta`. Nodes banned by contamination do not spread
//! further. `SI(mu, 0)` is the uniform hypothesis `H0(mu)`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{undirected_view, BanProfile, EgoGraph, PopulationDataset, UndirectedView};
use crate::h0::{estimate_mu, ln_binom_pmf_unchecked, H0Error};
use crate::rng::{aux_rng, trial_rng, BernoulliSkip, TrialRng};

/// Trial index reserved for planting, outside any simulation's trial range.
const PLANT_TRIAL: u64 = u32::MAX as u64;

#[derive(Debug, Error, PartialEq)]
pub enum EpidemicError {
    #[error("SI parameter {name}={value} outside [0, 1]")]
    BadParameter { name: &'static str, value: f64 },
    #[error("degree k must be at least 1")]
    BadDegree,
    #[error("no edge is incident to a banned node")]
    NoBannedEdges,
    #[error("ridge is empty")]
    EmptyRidge,
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("exact enumeration limited to {max} nodes, graph has {nodes}")]
    TooLarge { nodes: usize, max: usize },
    #[error(transparent)]
    H0(#[from] H0Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SIParams {
    pub p0: f64,
    pub beta: f64,
}

impl SIParams {
    pub fn new(p0: f64, beta: f64) -> Result<Self, EpidemicError> {
        for (name, value) in [("p0", p0), ("beta", beta)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(EpidemicError::BadParameter { name, value });
            }
        }
        Ok(SIParams { p0, beta })
    }

    /// The uniform hypothesis expressed as a degenerate SI model.
    pub fn uniform(mu: f64) -> Result<Self, EpidemicError> {
        SIParams::new(mu, 0.0)
    }
}

/// Per-thread buffers for repeated simulation on one graph.
#[derive(Clone, Debug, Default)]
pub struct SiScratch {
    mark: Vec<u32>,
    epoch: u32,
    initial: Vec<u32>,
    banned: Vec<u32>,
}

impl SiScratch {
    fn reset_for(&mut self, n: usize) {
        if self.mark.len() < n {
            self.mark.resize(n, 0);
        }
        if self.epoch == u32::MAX {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.initial.clear();
        self.banned.clear();
    }

    /// Indices banned in the last simulation.
    pub fn banned(&self) -> &[u32] {
        &self.banned
    }

    pub fn is_banned(&self, v: usize) -> bool {
        self.mark[v] == self.epoch
    }
}

/// Runs one SI trial and returns the number of banned nodes. The banned
/// set is left in `scratch`.
pub fn simulate_once(view: &UndirectedView, params: SIParams, rng: &mut TrialRng, scratch: &mut SiScratch) -> usize {
    use rand::Rng;

    let n = view.node_count();
    scratch.reset_for(n);
    let epoch = scratch.epoch;
    {
        let SiScratch {
            mark, initial, banned, ..
        } = scratch;
        BernoulliSkip::new(params.p0).for_each(n, rng, |i| {
            mark[i] = epoch;
            initial.push(i as u32);
            banned.push(i as u32);
        });
    }
    if params.beta > 0.0 {
        for idx in 0..scratch.initial.len() {
            let u = scratch.initial[idx] as usize;
            for &v in view.neighbors(u) {
                if rng.random::<f64>() < params.beta && scratch.mark[v as usize] != epoch {
                    scratch.mark[v as usize] = epoch;
                    scratch.banned.push(v);
                }
            }
        }
    }
    scratch.banned.len()
}

/// Banned-neighbor counts of the last simulated assignment:
/// `(sum over banned v of banned neighbors, sum over banned v of degree)`.
fn banned_pair_counts(view: &UndirectedView, scratch: &SiScratch) -> (u64, u64) {
    let (mut both, mut incident) = (0u64, 0u64);
    for &v in scratch.banned() {
        let nbrs = view.neighbors(v as usize);
        incident += nbrs.len() as u64;
        both += nbrs.iter().filter(|&&u| scratch.is_banned(u as usize)).count() as u64;
    }
    (both, incident)
}

/// One seeded SI assignment over the nodes of `g`, in node order.
pub fn si_simulate(g: &EgoGraph, params: SIParams, seed: u64) -> Vec<bool> {
    let view = undirected_view(g);
    let mut scratch = SiScratch::default();
    simulate_once(&view, params, &mut trial_rng(seed, 0, 0), &mut scratch);
    (0..view.node_count()).map(|v| scratch.is_banned(v)).collect()
}

/// `p0 + (1 - p0) * p1` with `p1` summed term by term over the number `v`
/// of initially banned neighbors among `k`.
pub fn analytic_mu(params: SIParams, k: u32) -> Result<f64, EpidemicError> {
    if k == 0 {
        return Err(EpidemicError::BadDegree);
    }
    let SIParams { p0, beta } = params;
    let p1: f64 = (1..=k as u64)
        .map(|v| ln_binom_pmf_unchecked(k as u64, v, p0).exp() * (1.0 - (1.0 - beta).powi(v as i32)))
        .sum();
    Ok(p0 + (1.0 - p0) * p1)
}

pub const EXACT_MAX_NODES: usize = 20;

/// Exact distribution of the banned count under `SI(p0, beta)`, indexed by
/// count. Sums over all `2^n` initial states; given the initial set, every
/// other node is contaminated independently with probability
/// `1 - (1 - beta)^(initially banned neighbors)`.
pub fn exact_count_pmf(view: &UndirectedView, params: SIParams) -> Result<Vec<f64>, EpidemicError> {
    let n = view.node_count();
    if n > EXACT_MAX_NODES {
        return Err(EpidemicError::TooLarge { nodes: n, max: EXACT_MAX_NODES });
    }
    let SIParams { p0, beta } = params;
    let mut pmf = vec![0.0; n + 1];
    let mut conv = vec![0.0; n + 1];
    for init in 0u32..1 << n {
        let k = init.count_ones() as usize;
        let weight = p0.powi(k as i32) * (1.0 - p0).powi((n - k) as i32);
        if weight == 0.0 {
            continue;
        }
        conv.iter_mut().for_each(|c| *c = 0.0);
        conv[k] = 1.0;
        for v in (0..n).filter(|v| init & (1 << v) == 0) {
            let hits = view.neighbors(v).iter().filter(|&&u| init & (1 << u) != 0).count();
            let q = 1.0 - (1.0 - beta).powi(hits as i32);
            for c in (1..=n).rev() {
                conv[c] = conv[c] * (1.0 - q) + conv[c - 1] * q;
            }
            conv[0] *= 1.0 - q;
        }
        pmf.iter_mut().zip(&conv).for_each(|(p, c)| *p += weight * c);
    }
    Ok(pmf)
}

/// Rough probability that a neighbor of a banned node is banned,
/// `p0 + (1 - p0) beta`. With `p0 = 0` nobody is banned and the
/// conditional is reported as 0.
pub fn neighbor_conditional_analytic(params: SIParams) -> f64 {
    if params.p0 == 0.0 {
        return 0.0;
    }
    params.p0 + (1.0 - params.p0) * params.beta
}

/// `|(SB x SB) ∩ E| / |(SB x V) ∩ E|` over the undirected views.
pub fn neighbor_conditional_empirical(d: &PopulationDataset) -> Result<f64, EpidemicError> {
    let (mut both, mut incident) = (0u64, 0u64);
    for g in &d.graphs {
        let view = undirected_view(g);
        for v in (0..view.node_count()).filter(|&v| view.is_banned(v)) {
            let nbrs = view.neighbors(v);
            incident += nbrs.len() as u64;
            both += nbrs.iter().filter(|&&u| view.is_banned(u as usize)).count() as u64;
        }
    }
    if incident == 0 {
        return Err(EpidemicError::NoBannedEdges);
    }
    Ok(both as f64 / incident as f64)
}

/// Rounded node-weighted mean undirected degree, at least 1.
pub fn default_degree_k(d: &PopulationDataset) -> u32 {
    let (mut deg, mut n) = (0usize, 0usize);
    for g in &d.graphs {
        let view = undirected_view(g);
        deg += 2 * view.edge_count();
        n += view.node_count();
    }
    if n == 0 {
        return 1;
    }
    ((deg as f64 / n as f64).round() as u32).max(1)
}

/// Undirected views of every graph, prepared once for repeated simulation.
#[derive(Clone, Debug)]
pub struct SiPopulation {
    views: Vec<UndirectedView>,
    total_nodes: u64,
}

impl SiPopulation {
    pub fn new(d: &PopulationDataset) -> Self {
        Self::from_views(d.graphs.par_iter().map(undirected_view).collect())
    }

    pub fn from_views(views: Vec<UndirectedView>) -> Self {
        let total_nodes = views.iter().map(|v| v.node_count() as u64).sum();
        SiPopulation { views, total_nodes }
    }

    pub fn views(&self) -> &[UndirectedView] {
        &self.views
    }

    pub fn total_nodes(&self) -> u64 {
        self.total_nodes
    }

    /// Total banned nodes summed over `trials` trials on graph `graph`.
    fn banned_total(&self, graph: usize, params: SIParams, trials: u64, seed: u64) -> u64 {
        let view = &self.views[graph];
        let mut scratch = SiScratch::default();
        (0..trials)
            .map(|t| simulate_once(view, params, &mut trial_rng(seed, graph, t), &mut scratch) as u64)
            .sum()
    }

    /// Pooled simulated ban rate: banned nodes over node slots, all graphs
    /// and trials together.
    pub fn simulated_mu(&self, params: SIParams, trials: u64, seed: u64) -> f64 {
        if self.total_nodes == 0 || trials == 0 {
            return 0.0;
        }
        let banned: u64 = (0..self.views.len())
            .into_par_iter()
            .map(|g| self.banned_total(g, params, trials, seed))
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        banned as f64 / (self.total_nodes * trials) as f64
    }

    /// Pooled simulated neighbor-conditional probability; `None` when no
    /// simulated banned node has a neighbor.
    pub fn simulated_neighbor_conditional(&self, params: SIParams, trials: u64, seed: u64) -> Option<f64> {
        let counts: Vec<(u64, u64)> = (0..self.views.len())
            .into_par_iter()
            .map(|g| {
                let view = &self.views[g];
                let mut scratch = SiScratch::default();
                let (mut both, mut incident) = (0u64, 0u64);
                for t in 0..trials {
                    simulate_once(view, params, &mut trial_rng(seed, g, t), &mut scratch);
                    let (b, i) = banned_pair_counts(view, &scratch);
                    both += b;
                    incident += i;
                }
                (both, incident)
            })
            .collect();
        let (both, incident) = counts.into_iter().fold((0, 0), |(a, b), (x, y)| (a + x, b + y));
        (incident > 0).then(|| both as f64 / incident as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RidgePoint {
    pub params: SIParams,
    pub simulated_mu: f64,
    pub distance: f64,
    pub trials: u64,
}

/// Parameter grids for ridge fitting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RidgeGrid {
    pub p0: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Default for RidgeGrid {
    /// `p0` in 0..=0.025 step 0.0025, `beta` in 0..=0.25 step 0.01.
    fn default() -> Self {
        RidgeGrid {
            p0: linspace(0.0, 0.025, 11),
            beta: linspace(0.0, 0.25, 26),
        }
    }
}

/// `count` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Simulated ban rate for every grid point, with its distance to `target_mu`.
/// Points are listed `p0`-major, `beta`-minor.
pub fn ridge_on(pop: &SiPopulation, target_mu: f64, grid: &RidgeGrid, trials: u64, seed: u64) -> Result<Vec<RidgePoint>, EpidemicError> {
    if grid.p0.is_empty() || grid.beta.is_empty() {
        return Err(EpidemicError::EmptyGrid);
    }
    let points: Vec<SIParams> = grid
        .p0
        .iter()
        .flat_map(|&p0| grid.beta.iter().map(move |&beta| SIParams::new(p0, beta)))
        .collect::<Result<_, _>>()?;
    let graphs = pop.views.len();
    let totals: Vec<u64> = (0..points.len() * graphs)
        .into_par_iter()
        .map(|job| pop.banned_total(job % graphs, points[job / graphs], trials, seed))
        .collect();
    let slots = (pop.total_nodes * trials) as f64;
    Ok(points
        .iter()
        .enumerate()
        .map(|(i, &params)| {
            let banned: u64 = totals[i * graphs..(i + 1) * graphs].iter().sum();
            let simulated_mu = if slots > 0.0 { banned as f64 / slots } else { 0.0 };
            RidgePoint {
                params,
                simulated_mu,
                distance: (simulated_mu - target_mu).abs(),
                trials,
            }
        })
        .collect())
}

/// Ridge of the dataset against its own estimated ban rate.
pub fn fit_ridge(d: &PopulationDataset, grid: &RidgeGrid, trials: u64, seed: u64) -> Result<Vec<RidgePoint>, EpidemicError> {
    let mu = estimate_mu(d)?;
    ridge_on(&SiPopulation::new(d), mu, grid, trials, seed)
}

/// For each `p0`, the grid point of smallest distance (smaller `beta` on ties).
pub fn ridge_minima(ridge: &[RidgePoint]) -> Vec<RidgePoint> {
    let mut out: Vec<RidgePoint> = Vec::new();
    for &pt in ridge {
        match out.iter_mut().find(|m| m.params.p0 == pt.params.p0) {
            Some(best) => {
                if pt.distance < best.distance || (pt.distance == best.distance && pt.params.beta < best.params.beta) {
                    *best = pt;
                }
            }
            None => out.push(pt),
        }
    }
    out.sort_by(|a, b| a.params.p0.total_cmp(&b.params.p0));
    out
}

/// Ridge minima farther than this fraction of the target ban rate cannot
/// reproduce it on the grid and are not eligible for selection.
pub const RIDGE_TOLERANCE: f64 = 0.1;

/// One member of the fitted family with its neighbor-conditional probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilyMember {
    pub ridge: RidgePoint,
    /// Whether the member reproduces the target ban rate within tolerance.
    pub on_ridge: bool,
    pub simulated_conditional: Option<f64>,
    pub analytic_conditional: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaSelection {
    pub params: SIParams,
    pub empirical_conditional: f64,
    pub family: Vec<FamilyMember>,
}

impl BetaSelection {
    /// How many times more likely contamination is than initial banning.
    pub fn beta_over_p0(&self) -> Option<f64> {
        (self.params.p0 > 0.0).then(|| self.params.beta / self.params.p0)
    }
}

/// Picks, among the per-`p0` ridge minima within `max_distance` of the
/// target ban rate, the model whose simulated neighbor-conditional
/// probability is closest to `empirical`. When no minimum is that close,
/// only the closest ones are eligible.
pub fn select_beta_on(
    pop: &SiPopulation,
    empirical: f64,
    ridge: &[RidgePoint],
    max_distance: f64,
    trials: u64,
    seed: u64,
) -> Result<BetaSelection, EpidemicError> {
    let minima = ridge_minima(ridge);
    let closest = minima.iter().map(|m| m.distance).min_by(f64::total_cmp).ok_or(EpidemicError::EmptyRidge)?;
    let limit = max_distance.max(closest);
    let family: Vec<FamilyMember> = minima
        .into_iter()
        .map(|pt| FamilyMember {
            ridge: pt,
            on_ridge: pt.distance <= limit,
            simulated_conditional: pop.simulated_neighbor_conditional(pt.params, trials, seed),
            analytic_conditional: neighbor_conditional_analytic(pt.params),
        })
        .collect();
    let best = family
        .iter()
        .filter(|m| m.on_ridge)
        .filter_map(|m| m.simulated_conditional.map(|c| (m, (c - empirical).abs())))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(m, _)| m.ridge.params)
        .ok_or(EpidemicError::NoBannedEdges)?;
    Ok(BetaSelection {
        params: best,
        empirical_conditional: empirical,
        family,
    })
}

/// [`select_beta_on`] with the dataset's own neighbor-conditional rate and a
/// tolerance of [`RIDGE_TOLERANCE`] times its ban rate.
pub fn select_beta(d: &PopulationDataset, ridge: &[RidgePoint], trials: u64, seed: u64) -> Result<BetaSelection, EpidemicError> {
    let empirical = neighbor_conditional_empirical(d)?;
    let max_distance = RIDGE_TOLERANCE * estimate_mu(d)?;
    select_beta_on(&SiPopulation::new(d), empirical, ridge, max_distance, trials, seed)
}

/// Replaces every ban annotation with a seeded SI assignment and records the
/// ground truth in the dataset metadata.
///
/// Banned nodes always carry the typeahead flag; search and ghost flags are
/// added independently so the type mix resembles observed data.
pub fn plant_synthetic(topologies: &PopulationDataset, params: SIParams, seed: u64) -> PopulationDataset {
    use rand::Rng;

    let graphs: Vec<EgoGraph> = topologies
        .graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let view = undirected_view(g);
            let mut scratch = SiScratch::default();
            simulate_once(&view, params, &mut trial_rng(seed, i, PLANT_TRIAL), &mut scratch);
            let mut types = aux_rng(seed, i as u64);
            let mut out = g.clone();
            for (v, node) in out.nodes.iter_mut().enumerate() {
                node.bans = if scratch.is_banned(v) {
                    BanProfile::new(true, types.random_bool(0.565), types.random_bool(0.09))
                } else {
                    BanProfile::NONE
                };
            }
            out
        })
        .collect();
    let mut planted = PopulationDataset {
        graphs,
        ..topologies.clone()
    };
    planted.metadata.insert(
        "ground_truth".into(),
        serde_json::json!({ "model": "SI", "p0": params.p0, "beta": params.beta, "seed": seed }),
    );
    planted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Node;

    fn path(n: usize) -> EgoGraph {
        EgoGraph {
            landmark: "n0".into(),
            crawl_time: None,
            nodes: (0..n).map(|i| Node::new(format!("n{i}"), BanProfile::NONE)).collect(),
            edges: (1..n).map(|i| (format!("n{}", i - 1).into(), format!("n{i}").into())).collect(),
        }
    }

    #[test]
    fn certain_initial_infection_bans_everyone() {
        let g = path(6);
        for beta in [0.0, 0.3, 1.0] {
            assert!(si_simulate(&g, SIParams::new(1.0, beta).unwrap(), 9).iter().all(|&b| b));
        }
    }

    #[test]
    fn certain_contamination_spreads_one_hop() {
        let view = path(3).undirected();
        let mut scratch = SiScratch::default();
        // Find a seed where only the middle node starts infected.
        let params = SIParams::new(0.3, 1.0).unwrap();
        let mut found = false;
        for t in 0..10_000 {
            let mut rng = trial_rng(1, 0, t);
            let mut probe = SiScratch::default();
            let init = SIParams::new(0.3, 0.0).unwrap();
            simulate_once(&view, init, &mut rng.clone(), &mut probe);
            if probe.banned() == [1] {
                assert_eq!(simulate_once(&view, params, &mut rng, &mut scratch), 3);
                found = true;
                break;
            }
        }
        assert!(found);
    }

    #[test]
    fn contamination_is_single_step() {
        // On a long path with beta = 1 and one initial node, at most 3 end up banned.
        let view = path(50).undirected();
        let mut scratch = SiScratch::default();
        for t in 0..2000 {
            let mut rng = trial_rng(5, 0, t);
            let mut probe = SiScratch::default();
            simulate_once(&view, SIParams::new(0.02, 0.0).unwrap(), &mut rng.clone(), &mut probe);
            let initial = probe.banned().len();
            let total = simulate_once(&view, SIParams::new(0.02, 1.0).unwrap(), &mut rng, &mut scratch);
            assert!(total <= 3 * initial);
        }
    }

    #[test]
    fn analytic_small_cases() {
        let p = SIParams::new(0.2, 0.35).unwrap();
        let k1 = analytic_mu(p, 1).unwrap();
        assert!((k1 - (0.2 + 0.8 * 0.2 * 0.35)).abs() < 1e-15);
        for k in [1, 3, 7, 40] {
            assert!((analytic_mu(SIParams::new(0.013, 0.0).unwrap(), k).unwrap() - 0.013).abs() < 1e-15);
        }
        assert_eq!(analytic_mu(p, 0), Err(EpidemicError::BadDegree));
    }

    #[test]
    fn analytic_sum_equals_closed_form() {
        // Summing over v is the same as 1 - (1 - p0 beta)^k.
        for &(p0, beta, k) in &[(0.015, 0.0955, 5u32), (0.3, 0.9, 12), (0.001, 0.5, 34)] {
            let p = SIParams::new(p0, beta).unwrap();
            let closed = p0 + (1.0 - p0) * (1.0 - (1.0 - p0 * beta).powi(k as i32));
            assert!((analytic_mu(p, k).unwrap() - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_neighbor_conditional() {
        let v = neighbor_conditional_analytic(SIParams::new(0.015, 0.0955).unwrap());
        assert!((v - 0.1090675).abs() < 1e-9);
        assert!((v - 0.1091).abs() < 1e-4);
        assert_eq!(neighbor_conditional_analytic(SIParams::new(0.04, 0.0).unwrap()), 0.04);
        assert_eq!(neighbor_conditional_analytic(SIParams::new(0.0, 0.3).unwrap()), 0.0);
    }

    #[test]
    fn empirical_conditional_all_banned() {
        let mut g = path(4);
        g.nodes.iter_mut().for_each(|n| n.bans.typeahead = true);
        assert_eq!(neighbor_conditional_empirical(&PopulationDataset::new("t", vec![g])).unwrap(), 1.0);
        let g = path(4);
        assert_eq!(
            neighbor_conditional_empirical(&PopulationDataset::new("t", vec![g])),
            Err(EpidemicError::NoBannedEdges)
        );
    }

    #[test]
    fn ridge_zero_point_is_target() {
        let d = PopulationDataset::new("t", vec![path(30), path(12)]);
        let grid = RidgeGrid {
            p0: vec![0.0],
            beta: vec![0.0, 0.5],
        };
        let ridge = ridge_on(&SiPopulation::new(&d), 0.0234, &grid, 10, 1).unwrap();
        assert_eq!(ridge[0].simulated_mu, 0.0);
        assert_eq!(ridge[0].distance, 0.0234);
        assert_eq!(ridge[1].distance, 0.0234);
        assert!(ridge_on(&SiPopulation::new(&d), 0.1, &RidgeGrid { p0: vec![], beta: vec![0.0] }, 1, 1).is_err());
    }

    #[test]
    fn minima_pick_lowest_distance_per_p0() {
        let mk = |p0, beta, distance| RidgePoint {
            params: SIParams { p0, beta },
            simulated_mu: 0.0,
            distance,
            trials: 1,
        };
        let ridge = vec![mk(0.01, 0.0, 0.3), mk(0.01, 0.1, 0.1), mk(0.01, 0.2, 0.1), mk(0.0, 0.0, 0.5)];
        let m = ridge_minima(&ridge);
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].params.p0, 0.0);
        assert_eq!(m[1].params, SIParams { p0: 0.01, beta: 0.1 });
    }

    #[test]
    fn planting_extremes() {
        let d = PopulationDataset::new("t", vec![path(20), path(5)]);
        let none = plant_synthetic(&d, SIParams::new(0.0, 0.0).unwrap(), 3);
        assert_eq!(none.total_banned(), 0);
        let all = plant_synthetic(&d, SIParams::new(1.0, 0.2).unwrap(), 3);
        assert_eq!(all.total_banned(), 25);
        assert!(all.graphs.iter().flat_map(|g| &g.nodes).all(|n| n.bans.typeahead));
        assert_eq!(all.metadata["ground_truth"]["p0"], 1.0);
    }

    #[test]
    fn parameters_are_validated() {
        assert!(SIParams::new(-0.1, 0.0).is_err());
        assert!(SIParams::new(0.1, 1.2).is_err());
        assert!(SIParams::uniform(0.5).is_ok());
    }

    #[test]
    fn default_k_rounds_mean_degree() {
        // Path of 4: degrees 1,2,2,1 -> 1.5 -> 2.
        assert_eq!(default_degree_k(&PopulationDataset::new("t", vec![path(4)])), 2);
        assert_eq!(default_degree_k(&PopulationDataset::default()), 1);
    }

    #[test]
    fn linspace_endpoints() {
        let g = RidgeGrid::default();
        assert_eq!(g.p0.len(), 11);
        assert_eq!(g.beta.len(), 26);
        assert!((g.p0[6] - 0.015).abs() < 1e-15);
        assert_eq!(*g.beta.last().unwrap(), 0.25);
    }
}
