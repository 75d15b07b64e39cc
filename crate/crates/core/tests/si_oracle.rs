use banscope_core::epidemic::{analytic_mu, exact_count_pmf, simulate_once, SIParams, SiPopulation, SiScratch};
use banscope_core::graph::UndirectedView;
use banscope_core::h0::h0_point_prob;
use banscope_core::likelihood::estimate_h1;
use banscope_core::rng::trial_rng;
use banscope_core::synth::random_regular;
use proptest::prelude::*;

fn view(n: usize, pairs: &[(usize, usize)]) -> UndirectedView {
    UndirectedView::from_pairs(n, pairs.iter().copied(), vec![false; n])
}

/// Banned-count distribution by exhaustive enumeration of every initial
/// state and every (initially banned node, neighbor) contamination outcome.
fn brute_force_pmf(g: &UndirectedView, params: SIParams) -> Vec<f64> {
    let n = g.node_count();
    let mut pmf = vec![0.0; n + 1];
    for init in 0u32..1 << n {
        let k = init.count_ones() as i32;
        let w_init = params.p0.powi(k) * (1.0 - params.p0).powi(n as i32 - k);
        let trials: Vec<(usize, usize)> = (0..n)
            .filter(|u| init & (1 << u) != 0)
            .flat_map(|u| g.neighbors(u).iter().map(move |&v| (u, v as usize)))
            .collect();
        for outcome in 0u64..1 << trials.len() {
            let mut banned = init;
            let mut w = w_init;
            for (t, &(_, v)) in trials.iter().enumerate() {
                if outcome & (1 << t) != 0 {
                    w *= params.beta;
                    banned |= 1 << v;
                } else {
                    w *= 1.0 - params.beta;
                }
            }
            pmf[banned.count_ones() as usize] += w;
        }
    }
    pmf
}

fn small_graphs() -> Vec<(&'static str, UndirectedView)> {
    vec![
        ("single", view(1, &[])),
        ("pair", view(2, &[(0, 1)])),
        ("path3", view(3, &[(0, 1), (1, 2)])),
        ("triangle", view(3, &[(0, 1), (1, 2), (0, 2)])),
        ("star4", view(4, &[(0, 1), (0, 2), (0, 3)])),
        ("cycle4", view(4, &[(0, 1), (1, 2), (2, 3), (0, 3)])),
        ("isolated4", view(4, &[(0, 1)])),
        ("k4", view(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])),
        ("path5", view(5, &[(0, 1), (1, 2), (2, 3), (3, 4)])),
        ("bowtie5", view(5, &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)])),
    ]
}

#[test]
fn exact_distribution_matches_brute_force() {
    for params in [SIParams::new(0.3, 0.5).unwrap(), SIParams::new(0.05, 0.9).unwrap(), SIParams::new(0.7, 0.1).unwrap()] {
        for (name, g) in small_graphs() {
            let exact = exact_count_pmf(&g, params).unwrap();
            let brute = brute_force_pmf(&g, params);
            for (a, b) in exact.iter().zip(&brute) {
                assert!((a - b).abs() < 1e-12, "{name} {params:?}: {exact:?} vs {brute:?}");
            }
            assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn monte_carlo_likelihood_within_three_sigma() {
    let params = SIParams::new(0.3, 0.5).unwrap();
    let trials = 20_000;
    for (gi, (name, g)) in small_graphs().into_iter().enumerate() {
        let exact = exact_count_pmf(&g, params).unwrap();
        for (s, &p) in exact.iter().enumerate() {
            let est = estimate_h1(&g, s, params, trials, 42, gi);
            let sd = (p * (1.0 - p) / trials as f64).sqrt().max(1.0 / trials as f64);
            assert!((est.probability() - p).abs() <= 3.0 * sd, "{name} s={s}: {} vs {p}", est.probability());
        }
    }
}

#[test]
fn forced_contamination_on_a_path() {
    let g = view(3, &[(0, 1), (1, 2)]);
    let mut rng = trial_rng(1, 0, 0);
    let mut scratch = SiScratch::default();
    let all = simulate_once(&g, SIParams::new(1.0, 0.3).unwrap(), &mut rng, &mut scratch);
    assert_eq!(all, 3);
    let exact = exact_count_pmf(&g, SIParams::new(0.5, 1.0).unwrap()).unwrap();
    // With beta = 1, any initial set containing the middle node, or both
    // ends, bans everyone: 5 of the 8 equally likely initial sets.
    assert!((exact[3] - 5.0 / 8.0).abs() < 1e-15);
}

#[test]
fn zero_beta_is_binomial() {
    let g = view(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
    let exact = exact_count_pmf(&g, SIParams::new(0.2, 0.0).unwrap()).unwrap();
    for (s, p) in exact.iter().enumerate() {
        assert!((p - h0_point_prob(5, s as u64, 0.2).unwrap()).abs() < 1e-14);
    }
}

#[test]
fn regular_graph_simulation_matches_analytic() {
    let pop = SiPopulation::from_views(vec![random_regular(1000, 5, 3)]);
    let params = SIParams::new(0.015, 0.0955).unwrap();
    let sim = pop.simulated_mu(params, 400, 9);
    let analytic = analytic_mu(params, 5).unwrap();
    assert!((sim - analytic).abs() < 0.002, "{sim} vs {analytic}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let pop = SiPopulation::from_views((0..8).map(|i| random_regular(200, 4, i)).collect());
    let params = SIParams::new(0.05, 0.2).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| (pop.simulated_mu(params, 300, 5), pop.simulated_neighbor_conditional(params, 300, 5)))
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analytic_is_monotone(p0 in 0.0f64..0.5, beta in 0.0f64..0.5, k in 1u32..40, dp in 0.0f64..0.1, db in 0.0f64..0.1) {
        let base = analytic_mu(SIParams::new(p0, beta).unwrap(), k).unwrap();
        prop_assert!(analytic_mu(SIParams::new(p0 + dp, beta).unwrap(), k).unwrap() >= base - 1e-12);
        prop_assert!(analytic_mu(SIParams::new(p0, beta + db).unwrap(), k).unwrap() >= base - 1e-12);
        prop_assert!(analytic_mu(SIParams::new(p0, beta).unwrap(), k + 1).unwrap() >= base - 1e-12);
    }
}
