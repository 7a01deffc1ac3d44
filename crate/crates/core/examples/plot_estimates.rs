//! Overlay two estimated CDFs with their confidence bands.
//!
//!     cargo run -p tornet --example plot_estimates [OUT_DIR]

use std::path::PathBuf;

use rand_distr::{Distribution, Exp};
use tornet::pipeline::{plot_estimates, PlotSeries, PlotStyle};
use tornet::stats::{network_estimate, true_estimate, EmpiricalDistribution, QuantileGrid, DEFAULT_CONFIDENCE};
use tornet::traffic::seeded_rng;

fn series(label: &str, rate: f64, seed: u64) -> tornet::Result<PlotSeries> {
    let grid = QuantileGrid::default();
    let mut rng = seeded_rng(seed, &[]);
    let nets = (0..4)
        .map(|_| {
            let sims = (0..3)
                .map(|_| {
                    let d = Exp::new(rate).unwrap();
                    EmpiricalDistribution::new((0..300).map(|_| d.sample(&mut rng)).collect(), 0.0)
                })
                .collect::<tornet::Result<Vec<_>>>()?;
            network_estimate(&sims, &grid, DEFAULT_CONFIDENCE, 0.0)
        })
        .collect::<tornet::Result<Vec<_>>>()?;
    Ok(PlotSeries {
        label: label.into(),
        rows: true_estimate(&nets, DEFAULT_CONFIDENCE)?.rows,
    })
}

fn main() -> tornet::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("tornet-plots"));
    let style = PlotStyle {
        title: "Time to last byte".into(),
        x_label: "seconds".into(),
        tail_log: true,
    };
    let files = plot_estimates(&[series("baseline", 1.0, 1)?, series("faster", 1.5, 2)?], &style, &out.join("ttlb"))?;
    println!("{}\n{}\n{}", files.svg.display(), files.csv.display(), files.metadata.display());
    Ok(())
}
