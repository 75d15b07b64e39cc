//! Per-graph likelihoods of the observed ban count under H0 (exact) and H1
//! (Monte-Carlo), and their comparison after binning into probability
//! classes.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::epidemic::{simulate_once, SIParams, SiScratch};
use crate::graph::{undirected_view, EgoGraph, NodeId, PopulationDataset, UndirectedView};
use crate::h0::{ln_point_prob, H0Error};
use crate::rng::trial_rng;

pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum LikelihoodError {
    #[error("bin edges must descend from 1 to 0 with at least two edges")]
    BadBinEdges,
    #[error(transparent)]
    H0(#[from] H0Error),
}

/// Monte-Carlo estimate of `P(S = s_observed)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct H1Estimate {
    pub hits: u64,
    pub trials: u64,
}

impl H1Estimate {
    pub fn probability(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.hits as f64 / self.trials as f64
    }

    /// Binomial standard error of the estimate.
    pub fn std_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let p = self.probability();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Smallest non-zero value the estimate can take.
    pub fn resolution(&self) -> f64 {
        1.0 / self.trials as f64
    }
}

/// Fraction of `trials` SI runs on `view` ending with exactly `observed`
/// banned nodes. `graph_index` selects the random streams.
pub fn estimate_h1(view: &UndirectedView, observed: usize, params: SIParams, trials: u64, seed: u64, graph_index: usize) -> H1Estimate {
    let mut scratch = SiScratch::default();
    let hits = (0..trials)
        .filter(|&t| simulate_once(view, params, &mut trial_rng(seed, graph_index, t), &mut scratch) == observed)
        .count() as u64;
    H1Estimate { hits, trials }
}

pub fn likelihood_h1(g: &EgoGraph, params: SIParams, trials: u64, seed: u64) -> H1Estimate {
    estimate_h1(&undirected_view(g), g.banned_count(), params, trials, seed, 0)
}

/// Exact `ln P(S = s_observed)` under H0(mu).
pub fn ln_likelihood_h0(g: &EgoGraph, mu: f64) -> Result<f64, H0Error> {
    ln_point_prob(g.len() as u64, g.banned_count() as u64, mu)
}

pub fn likelihood_h0(g: &EgoGraph, mu: f64) -> Result<f64, H0Error> {
    ln_likelihood_h0(g, mu).map(f64::exp)
}

/// Descending probability edges; bin `i` spans `[edges[i+1], edges[i])`,
/// except the first bin which also includes its upper edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinEdges(Vec<f64>);

impl Default for BinEdges {
    fn default() -> Self {
        BinEdges(vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4, 0.0])
    }
}

impl BinEdges {
    pub fn new(edges: Vec<f64>) -> Result<Self, LikelihoodError> {
        let ok = edges.len() >= 2
            && edges[0] == 1.0
            && *edges.last().unwrap() == 0.0
            && edges.windows(2).all(|w| w[0] > w[1]);
        if ok {
            Ok(BinEdges(edges))
        } else {
            Err(LikelihoodError::BadBinEdges)
        }
    }

    pub fn edges(&self) -> &[f64] {
        &self.0
    }

    pub fn bin_count(&self) -> usize {
        self.0.len() - 1
    }

    /// Bin index of a probability, 0 being the most likely class.
    pub fn bin_of(&self, p: f64) -> usize {
        let last = self.bin_count() - 1;
        (0..last).find(|&i| p >= self.0[i + 1]).unwrap_or(last)
    }

    /// Bin index of a probability given as a natural log.
    pub fn bin_of_ln(&self, ln_p: f64) -> usize {
        let last = self.bin_count() - 1;
        (0..last).find(|&i| ln_p >= self.0[i + 1].ln()).unwrap_or(last)
    }

    pub fn label(&self, bin: usize) -> String {
        let (hi, lo) = (self.0[bin], self.0[bin + 1]);
        if lo == 0.0 {
            format!("<{}", fmt_edge(hi))
        } else if bin == 0 {
            format!("[{},{}]", fmt_edge(lo), fmt_edge(hi))
        } else {
            format!("[{},{})", fmt_edge(lo), fmt_edge(hi))
        }
    }
}

fn fmt_edge(x: f64) -> String {
    if x == 1.0 {
        "1".into()
    } else {
        format!("{x:e}")
    }
}

/// Which bins count as likely and unlikely when forming the two ratios.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioClasses {
    /// Likelihoods at or above this are "likely".
    pub likely_min: f64,
    /// Likelihoods strictly below this are "unlikely".
    pub unlikely_max: f64,
}

impl Default for RatioClasses {
    fn default() -> Self {
        RatioClasses {
            likely_min: 1e-2,
            unlikely_max: 1e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LikelihoodReport {
    pub landmark: NodeId,
    pub n: u64,
    pub observed_s: u64,
    pub ln_l_h0: f64,
    pub l_h1: H1Estimate,
    pub bin_h0: usize,
    pub bin_h1: usize,
}

impl LikelihoodReport {
    pub fn l_h0_log10(&self) -> f64 {
        self.ln_l_h0 / std::f64::consts::LN_10
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinRow {
    pub label: String,
    pub upper: f64,
    pub lower: f64,
    pub h0: usize,
    pub h1: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub mu: f64,
    pub params: SIParams,
    pub trials: u64,
    pub classes: RatioClasses,
    pub reports: Vec<LikelihoodReport>,
    pub bins: Vec<BinRow>,
    pub likely_h0: usize,
    pub likely_h1: usize,
    pub unlikely_h0: usize,
    pub unlikely_h1: usize,
    /// likely(H1) / likely(H0); `None` when H0 has no likely graph.
    pub likely_ratio: Option<f64>,
    /// unlikely(H0) / unlikely(H1); `None` when H1 has no unlikely graph.
    pub unlikely_ratio: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Computes both likelihoods for every graph and tallies them per bin.
pub fn bin_and_compare(
    d: &PopulationDataset,
    mu: f64,
    params: SIParams,
    trials: u64,
    seed: u64,
    edges: &BinEdges,
    classes: RatioClasses,
) -> Result<Comparison, LikelihoodError> {
    let reports: Vec<LikelihoodReport> = d
        .graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let ln_l_h0 = ln_likelihood_h0(g, mu)?;
            let s = g.banned_count();
            let l_h1 = estimate_h1(&undirected_view(g), s, params, trials, seed, i);
            Ok(LikelihoodReport {
                landmark: g.landmark.clone(),
                n: g.len() as u64,
                observed_s: s as u64,
                ln_l_h0,
                l_h1,
                bin_h0: edges.bin_of_ln(ln_l_h0),
                bin_h1: edges.bin_of(l_h1.probability()),
            })
        })
        .collect::<Result<_, H0Error>>()?;

    let mut bins: Vec<BinRow> = (0..edges.bin_count())
        .map(|b| BinRow {
            label: edges.label(b),
            upper: edges.edges()[b],
            lower: edges.edges()[b + 1],
            h0: 0,
            h1: 0,
        })
        .collect();
    let (mut likely_h0, mut likely_h1, mut unlikely_h0, mut unlikely_h1) = (0, 0, 0, 0);
    let ln_likely = classes.likely_min.ln();
    let ln_unlikely = classes.unlikely_max.ln();
    for r in &reports {
        bins[r.bin_h0].h0 += 1;
        bins[r.bin_h1].h1 += 1;
        let p1 = r.l_h1.probability();
        likely_h0 += usize::from(r.ln_l_h0 >= ln_likely);
        likely_h1 += usize::from(p1 >= classes.likely_min);
        unlikely_h0 += usize::from(r.ln_l_h0 < ln_unlikely);
        unlikely_h1 += usize::from(p1 < classes.unlikely_max);
    }
    Ok(Comparison {
        mu,
        params,
        trials,
        classes,
        reports,
        bins,
        likely_h0,
        likely_h1,
        unlikely_h0,
        unlikely_h1,
        likely_ratio: ratio(likely_h1, likely_h0),
        unlikely_ratio: ratio(unlikely_h0, unlikely_h1),
    })
}
