//! The uniform-bug hypothesis: every user is banned independently with the
//! same probability `mu`.
//!
//! Observed ban counts in some ego-graphs have probabilities far below the
//! smallest normal `f64`, so everything here is computed on natural logs.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::graph::{NodeId, PopulationDataset};

#[derive(Debug, Error, PartialEq)]
pub enum H0Error {
    #[error("banned count {s} exceeds node count {n}")]
    CountOutOfRange { n: u64, s: u64 },
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("dataset has no nodes")]
    EmptyDataset,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct H0Model {
    pub mu: f64,
}

impl H0Model {
    pub fn new(mu: f64) -> Result<Self, H0Error> {
        check_probability(mu)?;
        Ok(H0Model { mu })
    }
}

fn check_probability(p: f64) -> Result<(), H0Error> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(H0Error::BadProbability(p))
    }
}

/// Sample mean of the banned flag over every node occurrence.
pub fn estimate_mu(d: &PopulationDataset) -> Result<f64, H0Error> {
    let total = d.total_nodes();
    if total == 0 {
        return Err(H0Error::EmptyDataset);
    }
    Ok(d.total_banned() as f64 / total as f64)
}

pub fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `ln P(S = s)` for `S ~ Binomial(n, p)`, without range checks.
pub(crate) fn ln_binom_pmf_unchecked(n: u64, s: u64, p: f64) -> f64 {
    if p == 0.0 {
        return if s == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p == 1.0 {
        return if s == n { 0.0 } else { f64::NEG_INFINITY };
    }
    ln_choose(n, s) + s as f64 * p.ln() + (n - s) as f64 * (-p).ln_1p()
}

/// Natural log of the binomial point probability `C(n,s) mu^s (1-mu)^(n-s)`.
pub fn ln_point_prob(n: u64, s: u64, mu: f64) -> Result<f64, H0Error> {
    check_probability(mu)?;
    if s > n {
        return Err(H0Error::CountOutOfRange { n, s });
    }
    Ok(ln_binom_pmf_unchecked(n, s, mu))
}

/// Binomial point probability. Values below ~5e-324 round to zero; use
/// [`ln_point_prob`] when the magnitude matters.
pub fn h0_point_prob(n: u64, s: u64, mu: f64) -> Result<f64, H0Error> {
    ln_point_prob(n, s, mu).map(f64::exp)
}

/// `ln(sum(exp(xs)))`, stable for very negative inputs.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Relative slack when comparing pmf values, as in R's `binom.test`.
const PMF_TIE_SLACK: f64 = 1e-7;

/// Natural log of the two-sided exact binomial p-value: the total mass of
/// outcomes whose probability does not exceed that of `s`.
pub fn ln_p_value(n: u64, s: u64, mu: f64) -> Result<f64, H0Error> {
    let observed = ln_point_prob(n, s, mu)?;
    let cutoff = observed + PMF_TIE_SLACK.ln_1p();
    let mut included = Vec::with_capacity(n as usize + 1);
    let mut all = true;
    for i in 0..=n {
        let lp = ln_binom_pmf_unchecked(n, i, mu);
        if lp <= cutoff {
            included.push(lp);
        } else {
            all = false;
        }
    }
    if all {
        return Ok(0.0);
    }
    Ok(log_sum_exp(included).min(0.0))
}

pub fn h0_p_value(n: u64, s: u64, mu: f64) -> Result<f64, H0Error> {
    ln_p_value(n, s, mu).map(f64::exp)
}

/// Mode of Binomial(n, p): `floor((n + 1) p)`, clamped to `n`.
pub fn binomial_mode(n: u64, p: f64) -> u64 {
    (((n + 1) as f64 * p).floor() as u64).min(n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphTestResult {
    pub landmark: NodeId,
    pub n: u64,
    pub s: u64,
    pub ln_point_prob: f64,
    pub ln_p_two_sided: f64,
}

impl GraphTestResult {
    pub fn point_prob(&self) -> f64 {
        self.ln_point_prob.exp()
    }

    pub fn p_two_sided(&self) -> f64 {
        self.ln_p_two_sided.exp()
    }

    pub fn point_prob_log10(&self) -> f64 {
        self.ln_point_prob / std::f64::consts::LN_10
    }

    pub fn p_value_log10(&self) -> f64 {
        self.ln_p_two_sided / std::f64::consts::LN_10
    }

    pub fn sb_ratio(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.s as f64 / self.n as f64
        }
    }
}

/// Tests every graph of the dataset against H0(mu), in dataset order.
pub fn test_graphs(d: &PopulationDataset, mu: f64) -> Result<Vec<GraphTestResult>, H0Error> {
    d.graphs
        .iter()
        .map(|g| {
            let n = g.len() as u64;
            let s = g.banned_count() as u64;
            Ok(GraphTestResult {
                landmark: g.landmark.clone(),
                n,
                s,
                ln_point_prob: ln_point_prob(n, s, mu)?,
                ln_p_two_sided: ln_p_value(n, s, mu)?,
            })
        })
        .collect()
}

/// The `k` graphs with the smallest point probability, ties broken by landmark.
pub fn rank_unlikely(d: &PopulationDataset, mu: f64, k: usize) -> Result<Vec<GraphTestResult>, H0Error> {
    let mut results = test_graphs(d, mu)?;
    results.sort_by(|a, b| {
        a.ln_point_prob
            .total_cmp(&b.ln_point_prob)
            .then_with(|| a.landmark.cmp(&b.landmark))
    });
    results.truncate(k);
    Ok(results)
}
