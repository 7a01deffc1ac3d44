//! Generate one small network and simulate it for ten minutes.
//!
//!     cargo run --release -p tornet --example simulate_network [LOAD]

use std::path::Path;

use tornet::netgen::{generate, load_map, ScaleParams};
use tornet::pipeline::cmd_stage;
use tornet::sim::{relay_goodput_series, run, DownloadKind, Outcome, TrafficModels};
use tornet::stats::EmpiricalDistribution;

fn main() -> tornet::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let load: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let staged = cmd_stage(
        &fixtures.join("corpus/snapshots.jsonl"),
        &fixtures.join("corpus/descriptors.jsonl"),
        &fixtures.join("corpus/users.jsonl"),
        &std::env::temp_dir().join("tornet-staged.json"),
    )?;
    let map = load_map(&fixtures.join("map.graphml"))?;
    let config = generate(
        &staged,
        &map,
        &ScaleParams {
            scale: 0.035,
            load,
            process_scale: 0.005,
            seed: 3,
        },
    )?;

    let record = run(&config, &map, &TrafficModels::default(), 600.0, 11)?;
    println!("{} downloads, errors {:?}", record.downloads.len(), record.errors);
    for kind in DownloadKind::PERF {
        let done: Vec<f64> = record
            .downloads
            .iter()
            .filter(|d| d.kind == kind && d.outcome == Outcome::Ok)
            .filter_map(|d| d.ttlb_s)
            .collect();
        let timeouts = record.downloads.iter().filter(|d| d.kind == kind && d.outcome == Outcome::Timeout).count();
        if let Ok(dist) = EmpiricalDistribution::new(done.clone(), 0.01) {
            println!(
                "{:>8}: {} ok, {timeouts} timed out, ttlb median {:.2} s, p90 {:.2} s",
                kind.as_str(),
                done.len(),
                dist.inverse_cdf(0.5)?,
                dist.inverse_cdf(0.9)?
            );
        }
    }
    let gbit = relay_goodput_series(&record.goodput_bits, None);
    let mean = gbit.iter().sum::<f64>() / gbit.len().max(1) as f64;
    println!("mean relay goodput {:.4} Gbit/s", mean);
    Ok(())
}
