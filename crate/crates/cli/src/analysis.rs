//! Dataset analyses: statistics, H0 tests, SI fitting, likelihoods, features.

use std::collections::HashMap;
use std::path::Path;

use banscope_core::epidemic::{default_degree_k, fit_ridge, analytic_mu, linspace, neighbor_conditional_empirical, ridge_minima, select_beta, RidgeGrid, RidgePoint, SIParams};
use banscope_core::features::{balance, fit_tree, samples_from_dataset, split, MaxFeatures, TreeParams};
use banscope_core::graph::{
    ban_cooccurrence, clustering_avg, degree_by_ban_status, neighbor_sb_fraction, topology_summary, two_core_size, undirected_view, BanType, PopulationDataset,
};
use banscope_core::h0::{estimate_mu, rank_unlikely, test_graphs};
use banscope_core::ingest::{filter_suitable, load_dataset, FilterReport};
use banscope_core::likelihood::{bin_and_compare, BinEdges, RatioClasses};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::{DatasetArgs, FeaturesArgs, FitArgs, GridArgs, H0Args, LikelihoodArgs, MaxFeaturesArg, SelectArgs, StatsArgs};
use crate::error::{CliError, Result};
use crate::output::Run;

pub fn load(args: &DatasetArgs) -> Result<(PopulationDataset, FilterReport)> {
    let d = load_dataset(&args.input)?;
    Ok(filter_suitable(&d, args.min_nodes))
}

fn require_graphs(d: &PopulationDataset) -> Result<()> {
    if d.graphs.is_empty() {
        return Err(CliError::Data("no graph left after filtering".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct GraphRow<'a> {
    landmark: &'a str,
    n: usize,
    s: usize,
    sb_fraction: f64,
    edges: usize,
    mean_degree: f64,
    clustering: f64,
    two_core_size: usize,
}

#[derive(Serialize)]
struct CooccurrenceRow {
    given: &'static str,
    users: usize,
    typeahead: Option<f64>,
    search: Option<f64>,
    ghost: Option<f64>,
}

pub fn stats(args: &StatsArgs, run: &mut Run) -> Result<()> {
    let (d, filtered) = load(&args.data)?;
    require_graphs(&d)?;
    let rows: Vec<GraphRow> = d
        .graphs
        .par_iter()
        .map(|g| {
            let view = undirected_view(g);
            GraphRow {
                landmark: g.landmark.as_str(),
                n: g.len(),
                s: g.banned_count(),
                sb_fraction: g.banned_count() as f64 / g.len() as f64,
                edges: view.edge_count(),
                mean_degree: view.mean_degree(),
                clustering: clustering_avg(g),
                two_core_size: two_core_size(g),
            }
        })
        .collect();
    run.csv("stats_graphs.csv", &rows)?;

    let co = ban_cooccurrence(&d);
    let co_rows = BanType::ALL.map(|given| CooccurrenceRow {
        given: given.as_str(),
        users: co.total(given),
        typeahead: co.conditional(given, BanType::Typeahead),
        search: co.conditional(given, BanType::Search),
        ghost: co.conditional(given, BanType::Ghost),
    });
    run.csv("stats_cooccurrence.csv", co_rows)?;

    let summary = json!({
        "population": d.name,
        "graphs": d.graphs.len(),
        "filtered_out": filtered.removed,
        "mu": estimate_mu(&d)?,
        "topology": topology_summary(&d)?,
        "degree_by_ban_status": degree_by_ban_status(&d)?,
        "neighbor_sb_fraction": neighbor_sb_fraction(&d)?,
        "neighbor_conditional": neighbor_conditional_empirical(&d).ok(),
        "banned_users": co.banned_users,
        "distinct_users": co.distinct_users,
    });
    run.json("stats.json", &summary)
}

#[derive(Serialize)]
struct H0Row<'a> {
    landmark: &'a str,
    n: u64,
    s: u64,
    point_prob_log10: f64,
    p_value: f64,
    p_value_log10: f64,
}

#[derive(Serialize)]
struct TopRow<'a> {
    rank: usize,
    landmark: &'a str,
    n: u64,
    s: u64,
    sb_ratio: f64,
    point_prob: f64,
    point_prob_log10: f64,
}

pub fn h0_test(args: &H0Args, run: &mut Run) -> Result<()> {
    let (d, filtered) = load(&args.data)?;
    require_graphs(&d)?;
    let mu = match args.mu {
        Some(mu) => mu,
        None => estimate_mu(&d)?,
    };
    let results = test_graphs(&d, mu)?;
    run.csv(
        "h0_test.csv",
        results.iter().map(|r| H0Row {
            landmark: r.landmark.as_str(),
            n: r.n,
            s: r.s,
            point_prob_log10: r.point_prob_log10(),
            p_value: r.p_two_sided(),
            p_value_log10: r.p_value_log10(),
        }),
    )?;
    let top = rank_unlikely(&d, mu, args.top)?;
    run.csv(
        "h0_top.csv",
        top.iter().enumerate().map(|(i, r)| TopRow {
            rank: i + 1,
            landmark: r.landmark.as_str(),
            n: r.n,
            s: r.s,
            sb_ratio: r.sb_ratio(),
            point_prob: r.point_prob(),
            point_prob_log10: r.point_prob_log10(),
        }),
    )?;
    let rejected = results.iter().filter(|r| r.p_two_sided() < 0.01).count();
    run.json(
        "h0_summary.json",
        &json!({ "mu": mu, "graphs": d.graphs.len(), "filtered_out": filtered.removed, "p_below_0.01": rejected }),
    )
}

fn grid(g: &GridArgs) -> Result<RidgeGrid> {
    let ok = |lo: f64, hi: f64, n: usize| (0.0..=1.0).contains(&lo) && (lo..=1.0).contains(&hi) && n > 0;
    if !ok(g.p0_min, g.p0_max, g.p0_steps) || !ok(g.beta_min, g.beta_max, g.beta_steps) {
        return Err(CliError::Usage("grid bounds must satisfy 0 <= min <= max <= 1 with at least one step".into()));
    }
    Ok(RidgeGrid {
        p0: linspace(g.p0_min, g.p0_max, g.p0_steps),
        beta: linspace(g.beta_min, g.beta_max, g.beta_steps),
    })
}

#[derive(Serialize, Deserialize)]
struct RidgeRow {
    p0: f64,
    beta: f64,
    simulated_mu: f64,
    distance: f64,
    trials: u64,
    #[serde(default)]
    analytic_mu: Option<f64>,
}

impl RidgeRow {
    fn from_point(p: &RidgePoint, analytic: Option<f64>) -> Self {
        RidgeRow {
            p0: p.params.p0,
            beta: p.params.beta,
            simulated_mu: p.simulated_mu,
            distance: p.distance,
            trials: p.trials,
            analytic_mu: analytic,
        }
    }
}

pub fn fit_h1(args: &FitArgs, run: &mut Run) -> Result<()> {
    let (d, _) = load(&args.data)?;
    require_graphs(&d)?;
    let ridge = fit_ridge(&d, &grid(&args.grid)?, args.grid.trials, run.seed())?;
    let k = args.k.unwrap_or_else(|| default_degree_k(&d));
    let analytic = |p: &RidgePoint| analytic_mu(p.params, k).ok();
    run.csv("ridge.csv", ridge.iter().map(|p| RidgeRow::from_point(p, analytic(p))))?;
    run.csv("ridge_minima.csv", ridge_minima(&ridge).iter().map(|p| RidgeRow::from_point(p, analytic(p))))?;
    run.json("fit_h1.json", &json!({ "mu": estimate_mu(&d)?, "k": k, "points": ridge.len() }))
}

fn read_ridge(path: &Path) -> Result<Vec<RidgePoint>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize::<RidgeRow>()
        .map(|row| {
            let row = row?;
            Ok(RidgePoint {
                params: SIParams::new(row.p0, row.beta)?,
                simulated_mu: row.simulated_mu,
                distance: row.distance,
                trials: row.trials,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct FamilyRow {
    p0: f64,
    beta: f64,
    simulated_mu: f64,
    distance: f64,
    simulated_conditional: Option<f64>,
    analytic_conditional: f64,
}

pub fn select(args: &SelectArgs, run: &mut Run) -> Result<()> {
    let (d, _) = load(&args.data)?;
    require_graphs(&d)?;
    let seed = run.seed();
    let ridge = match &args.ridge {
        Some(path) => read_ridge(path)?,
        None => fit_ridge(&d, &grid(&args.grid)?, args.grid.trials, seed)?,
    };
    let sel = select_beta(&d, &ridge, args.grid.trials, seed.wrapping_add(1))?;
    run.csv(
        "select_beta.csv",
        sel.family.iter().map(|m| FamilyRow {
            p0: m.ridge.params.p0,
            beta: m.ridge.params.beta,
            simulated_mu: m.ridge.simulated_mu,
            distance: m.ridge.distance,
            simulated_conditional: m.simulated_conditional,
            analytic_conditional: m.analytic_conditional,
        }),
    )?;
    run.json(
        "select_beta.json",
        &json!({
            "p0": sel.params.p0,
            "beta": sel.params.beta,
            "beta_over_p0": sel.beta_over_p0(),
            "empirical_conditional": sel.empirical_conditional,
            "mu": estimate_mu(&d)?,
            "ground_truth": d.metadata.get("ground_truth"),
        }),
    )
}

#[derive(Serialize)]
struct LikelihoodRow<'a> {
    landmark: &'a str,
    n: u64,
    s: u64,
    #[serde(rename = "L_h0_log10")]
    l_h0_log10: f64,
    #[serde(rename = "L_h1")]
    l_h1: f64,
    trials: u64,
    bin_h0: &'a str,
    bin_h1: &'a str,
}

pub fn likelihood(args: &LikelihoodArgs, run: &mut Run) -> Result<()> {
    let (d, _) = load(&args.data)?;
    require_graphs(&d)?;
    let params = SIParams::new(args.p0, args.beta)?;
    let mu = match args.mu {
        Some(mu) => mu,
        None => estimate_mu(&d)?,
    };
    let edges = match &args.bins {
        Some(b) => BinEdges::new(b.clone())?,
        None => BinEdges::default(),
    };
    let classes = RatioClasses {
        likely_min: args.likely_min,
        unlikely_max: args.unlikely_max,
    };
    let cmp = bin_and_compare(&d, mu, params, args.trials, run.seed(), &edges, classes)?;
    let labels: Vec<String> = (0..edges.bin_count()).map(|b| edges.label(b)).collect();
    run.csv(
        "likelihood.csv",
        cmp.reports.iter().map(|r| LikelihoodRow {
            landmark: r.landmark.as_str(),
            n: r.n,
            s: r.observed_s,
            l_h0_log10: r.l_h0_log10(),
            l_h1: r.l_h1.probability(),
            trials: r.l_h1.trials,
            bin_h0: &labels[r.bin_h0],
            bin_h1: &labels[r.bin_h1],
        }),
    )?;
    run.csv("likelihood_bins.csv", &cmp.bins)?;
    run.json(
        "likelihood.json",
        &json!({
            "mu": mu,
            "p0": params.p0,
            "beta": params.beta,
            "trials": args.trials,
            "classes": classes,
            "likely_h0": cmp.likely_h0,
            "likely_h1": cmp.likely_h1,
            "unlikely_h0": cmp.unlikely_h0,
            "unlikely_h1": cmp.unlikely_h1,
            "likely_ratio": cmp.likely_ratio,
            "unlikely_ratio": cmp.unlikely_ratio,
        }),
    )
}

#[derive(Serialize)]
struct ImportanceRow<'a> {
    rank: usize,
    feature: &'a str,
    impurity: f64,
    permutation: f64,
}

pub fn features(args: &FeaturesArgs, run: &mut Run) -> Result<()> {
    let d = load_dataset(&args.input)?;
    let seed = run.seed();
    let (samples, dropped) = samples_from_dataset(&d);
    let samples = if args.no_balance { samples } else { balance(&samples, seed)? };
    let (train, test) = split(&samples, args.train_fraction, seed.wrapping_add(1))?;
    let params = TreeParams {
        max_features: match args.max_features {
            MaxFeaturesArg::All => MaxFeatures::All,
            MaxFeaturesArg::Sqrt => MaxFeatures::Sqrt,
            MaxFeaturesArg::Log2 => MaxFeatures::Log2,
        },
        min_samples_split: args.min_samples_split,
        min_samples_leaf: args.min_samples_leaf,
    };
    let model = fit_tree(&train, params, seed.wrapping_add(2))?;
    let held_out = if test.is_empty() { &train } else { &test };
    let impurity = model.impurity_importance();
    let permutation: HashMap<String, f64> = model
        .permutation_importance(held_out, args.permutation_repeats, seed.wrapping_add(3))?
        .into_iter()
        .map(|s| (s.feature, s.score))
        .collect();
    run.csv(
        "features_importance.csv",
        impurity.iter().enumerate().map(|(i, s)| ImportanceRow {
            rank: i + 1,
            feature: &s.feature,
            impurity: s.score,
            permutation: permutation.get(&s.feature).copied().unwrap_or(0.0),
        }),
    )?;
    run.json("features_tree.json", &model)?;
    let positives = samples.iter().filter(|s| s.label).count();
    run.json(
        "features.json",
        &json!({
            "samples": samples.len(),
            "positives": positives,
            "dropped_incomplete": dropped,
            "train": train.len(),
            "test": test.len(),
            "train_accuracy": model.accuracy(&train)?,
            "test_accuracy": if test.is_empty() { None } else { Some(model.accuracy(&test)?) },
            "tree_depth": model.root.depth(),
            "leaves": model.root.leaf_count(),
        }),
    )
}
