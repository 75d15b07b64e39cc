use banscope_core::epidemic::{fit_ridge, neighbor_conditional_empirical, plant_synthetic, select_beta, RidgeGrid, SIParams};
use banscope_core::h0::estimate_mu;
use banscope_core::likelihood::{bin_and_compare, BinEdges, RatioClasses};
use banscope_core::synth::{synthetic_topologies, TopologyConfig};
use banscope_core::PopulationDataset;

fn topologies(graphs: usize) -> PopulationDataset {
    synthetic_topologies(&TopologyConfig::random_population(graphs, 21))
}

#[test]
fn degenerate_plantings() {
    let topo = topologies(30);
    let none = plant_synthetic(&topo, SIParams::new(0.0, 0.0).unwrap(), 1);
    assert_eq!(none.total_banned(), 0);
    let all = plant_synthetic(&topo, SIParams::new(1.0, 0.4).unwrap(), 1);
    assert_eq!(all.total_banned(), all.total_nodes());
    let truth = &all.metadata["ground_truth"];
    assert_eq!(truth["p0"], 1.0);
    assert_eq!(truth["beta"], 0.4);
}

#[test]
fn uniform_planting_recovers_zero_beta() {
    let topo = topologies(200);
    let mu = 0.0234;
    let d = plant_synthetic(&topo, SIParams::uniform(mu).unwrap(), 8);
    let n = d.total_nodes() as f64;
    let observed = estimate_mu(&d).unwrap();
    assert!((observed - mu).abs() < 3.0 * (mu * (1.0 - mu) / n).sqrt());

    // Independence: a banned node's neighbors are banned at the base rate.
    let cond = neighbor_conditional_empirical(&d).unwrap();
    assert!((cond - mu).abs() < 0.01, "conditional {cond}");

    let ridge = fit_ridge(&d, &RidgeGrid::default(), 50, 3).unwrap();
    let sel = select_beta(&d, &ridge, 50, 4).unwrap();
    assert!(sel.params.beta <= 0.01 + 1e-12, "{:?}", sel.params);
}

#[test]
fn directional_likelihood_separation() {
    let topo = topologies(150);
    let fitted = SIParams::new(0.015, 0.0955).unwrap();
    let edges = BinEdges::default();
    let compare = |d: &PopulationDataset| {
        let mu = estimate_mu(d).unwrap();
        bin_and_compare(d, mu, fitted, 2000, 6, &edges, RatioClasses::default()).unwrap()
    };
    let h1 = compare(&plant_synthetic(&topo, fitted, 2));
    assert!(h1.likely_ratio.unwrap() > 1.0, "{:?}", h1.likely_ratio);
    assert!(h1.unlikely_ratio.unwrap() > 1.0, "{:?}", h1.unlikely_ratio);
    let per_bin_h0: usize = h1.bins.iter().map(|b| b.h0).sum();
    assert_eq!(per_bin_h0, 150);
}

#[test]
fn selection_stays_on_the_ridge() {
    let d = plant_synthetic(&topologies(60), SIParams::new(0.015, 0.0955).unwrap(), 5);
    let ridge = fit_ridge(&d, &RidgeGrid::default(), 30, 9).unwrap();
    let sel = select_beta(&d, &ridge, 30, 10).unwrap();
    let chosen = sel.family.iter().find(|m| m.ridge.params == sel.params).unwrap();
    assert!(chosen.on_ridge);
    let closest = sel.family.iter().map(|m| m.ridge.distance).fold(f64::INFINITY, f64::min);
    assert!(sel.family.iter().any(|m| m.on_ridge && m.ridge.distance == closest));
    // Off-ridge members may still have a closer conditional rate; they lose anyway.
    for m in sel.family.iter().filter(|m| !m.on_ridge) {
        assert!(m.ridge.distance > closest);
    }
}
