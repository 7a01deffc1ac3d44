//! Stage, generate, simulate, analyze and plot a small experiment.
//!
//!     cargo run --release -p tornet --example full_pipeline [OUT_DIR]

use std::path::{Path, PathBuf};

use tornet::pipeline::{
    cmd_analyze, cmd_generate, cmd_plot, cmd_simulate, cmd_stage, AnalysisOptions, ExperimentPlan, Metric,
};

fn main() -> tornet::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("tornet-experiment"));
    std::fs::create_dir_all(&out).map_err(|e| tornet::Error::Usage(e.to_string()))?;

    let staged = out.join("staged.json");
    cmd_stage(
        &fixtures.join("corpus/snapshots.jsonl"),
        &fixtures.join("corpus/descriptors.jsonl"),
        &fixtures.join("corpus/users.jsonl"),
        &staged,
    )?;

    let mut plan = ExperimentPlan::new(&staged, fixtures.join("map.graphml"), &out);
    plan.scale = 0.035;
    plan.load = 0.2;
    plan.pscale = 0.005;
    plan.networks = 3;
    plan.sims_per_net = 2;
    plan.duration_s = 600.0;
    plan.warmup_s = 120.0;
    plan.seed = 7;
    cmd_generate(&plan)?;

    let parallelism = std::thread::available_parallelism().map_or(1, |n| n.get());
    let runs = cmd_simulate(&plan, parallelism)?;
    println!("{} runs finished", runs.len());

    let opts = AnalysisOptions {
        metrics: vec![Metric::Ttfb, Metric::Ttlb(tornet::sim::DownloadKind::Perf50k), Metric::Goodput],
        ..AnalysisOptions::default()
    };
    for (metric, est, csv) in cmd_analyze(&plan, &opts)? {
        let median = est.rows.iter().find(|r| (r.q - 0.5).abs() < 1e-9).unwrap();
        println!(
            "{metric}: median {:.3} in [{:.3}, {:.3}] from {} networks",
            median.mu, median.ci_lo, median.ci_hi, est.networks
        );
        let files = cmd_plot(&[(metric.to_string(), csv)], metric.name(), metric.is_time(), &out.join("plots").join(metric.name()))?;
        println!("  plot {}", files.svg.display());
    }
    Ok(())
}
