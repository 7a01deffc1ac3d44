//! Estimate a distribution with confidence intervals from synthetic
//! samples drawn in several networks, several simulations each.
//!
//!     cargo run -p tornet --example estimate_quantiles

use rand_distr::{Distribution, LogNormal, Normal};
use tornet::stats::{network_estimate, true_estimate, EmpiricalDistribution, QuantileGrid, DEFAULT_CONFIDENCE};
use tornet::traffic::seeded_rng;

fn main() -> tornet::Result<()> {
    let grid = QuantileGrid::new(vec![0.1, 0.25, 0.5, 0.75, 0.9, 0.99])?;
    let mut rng = seeded_rng(2024, &[]);
    let network_effect = Normal::new(0.0, 0.15).unwrap();

    let mut nets = Vec::new();
    for _ in 0..5 {
        // Each network shifts the log-median of download times.
        let shift: f64 = network_effect.sample(&mut rng);
        let times = LogNormal::new(shift, 0.5).unwrap();
        let sims = (0..4)
            .map(|_| {
                let samples = (0..500).map(|_| (times.sample(&mut rng) * 100.0).ceil() / 100.0).collect();
                EmpiricalDistribution::new(samples, 0.01)
            })
            .collect::<tornet::Result<Vec<_>>>()?;
        nets.push(network_estimate(&sims, &grid, DEFAULT_CONFIDENCE, 0.01)?);
    }

    let est = true_estimate(&nets, DEFAULT_CONFIDENCE)?;
    println!("{:>5} {:>7} {:>7} {:>7}  interval", "q", "mu", "delta", "eps");
    for r in &est.rows {
        println!(
            "{:>5} {:>7.3} {:>7.3} {:>7.3}  [{:.3}, {:.3}]",
            r.q, r.mu, r.delta, r.epsilon, r.ci_lo, r.ci_hi
        );
    }
    Ok(())
}
