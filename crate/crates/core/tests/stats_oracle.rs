mod common;

use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use tornet::stats::{network_estimate, true_estimate, EmpiricalDistribution, NetworkEstimate, QuantileGrid};
use tornet::traffic::seeded_rng;

use common::{naive_network, naive_true};

const CONF: f64 = 0.95;

fn estimate(nets: &[Vec<Vec<f64>>], grid: &QuantileGrid, r: f64) -> Vec<NetworkEstimate> {
    nets.iter()
        .map(|sims| {
            let d: Vec<_> = sims.iter().map(|s| EmpiricalDistribution::new(s.clone(), r).unwrap()).collect();
            network_estimate(&d, grid, CONF, r).unwrap()
        })
        .collect()
}

fn samples() -> impl Strategy<Value = Vec<Vec<Vec<f64>>>> {
    let sim = prop::collection::vec(0.0f64..100.0, 1..=60);
    (2usize..=6, 1usize..=4).prop_flat_map(move |(n, m)| {
        prop::collection::vec(prop::collection::vec(sim.clone(), m), n)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_straight_line_implementation(nets in samples(), r in prop_oneof![Just(0.0), Just(0.01), 0.0f64..1.0]) {
        let grid = QuantileGrid::new(vec![0.1, 0.5, 0.9, 0.99, 1.0]).unwrap();
        let est = true_estimate(&estimate(&nets, &grid, r), CONF).unwrap();
        for (row, &q) in est.rows.iter().zip(grid.values()) {
            let naive: Vec<_> = nets.iter().map(|sims| naive_network(sims, q, CONF, r)).collect();
            let (mu, sigma, delta, epsilon) = naive_true(&naive, CONF);
            prop_assert!((row.mu - mu).abs() <= 1e-9 * mu.abs().max(1.0));
            prop_assert!((row.sigma - sigma).abs() <= 1e-9 * sigma.max(1.0));
            prop_assert!((row.delta - delta).abs() <= 1e-9 * delta.max(1.0));
            prop_assert!((row.epsilon - epsilon).abs() <= 1e-9 * epsilon.max(1.0));
        }
    }

    #[test]
    fn epsilon_bounds_delta(nets in samples()) {
        let grid = QuantileGrid::default();
        let est = true_estimate(&estimate(&nets, &grid, 0.01), CONF).unwrap();
        for row in &est.rows {
            prop_assert!(row.delta >= 0.0);
            prop_assert!(row.epsilon >= row.delta);
            prop_assert!((row.ci_hi - row.ci_lo - 2.0 * row.epsilon).abs() <= 1e-9 * row.epsilon.max(1.0));
        }
    }

    #[test]
    fn scaling_samples_scales_estimates(nets in samples(), c in 0.1f64..10.0) {
        let grid = QuantileGrid::new(vec![0.25, 0.5, 0.75]).unwrap();
        let base = true_estimate(&estimate(&nets, &grid, 0.0), CONF).unwrap();
        let scaled: Vec<Vec<Vec<f64>>> = nets
            .iter()
            .map(|sims| sims.iter().map(|s| s.iter().map(|x| x * c).collect()).collect())
            .collect();
        let scaled = true_estimate(&estimate(&scaled, &grid, 0.0), CONF).unwrap();
        for (a, b) in base.rows.iter().zip(&scaled.rows) {
            prop_assert!((b.mu - c * a.mu).abs() <= 1e-9 * (c * a.mu).abs().max(1.0));
            prop_assert!((b.epsilon - c * a.epsilon).abs() <= 1e-9 * (c * a.epsilon).max(1.0));
        }
    }
}

#[test]
fn single_network_is_rejected() {
    let grid = QuantileGrid::new(vec![0.5]).unwrap();
    let nets = estimate(&[vec![vec![1.0, 2.0]]], &grid, 0.0);
    assert!(true_estimate(&nets, CONF).is_err());
}

/// Networks whose medians vary around a known value: the interval should
/// contain the true median in at least 90% of repetitions.
#[test]
fn interval_covers_true_median() {
    let grid = QuantileGrid::new(vec![0.5]).unwrap();
    let reps = 400;
    let mut rng = seeded_rng(3, &[]);
    let net_spread = Normal::new(0.0, 1.0).unwrap();
    let mut covered = 0;
    for _ in 0..reps {
        let nets: Vec<Vec<Vec<f64>>> = (0..10)
            .map(|_| {
                let shift = net_spread.sample(&mut rng);
                (0..5)
                    .map(|_| (0..50).map(|_| 10.0 + shift + rng.random::<f64>() - 0.5).collect())
                    .collect()
            })
            .collect();
        let row = &true_estimate(&estimate(&nets, &grid, 0.0), CONF).unwrap().rows[0];
        if row.ci_lo <= 10.0 && 10.0 <= row.ci_hi {
            covered += 1;
        }
    }
    assert!(covered as f64 / reps as f64 >= 0.90, "{covered}/{reps}");
}
