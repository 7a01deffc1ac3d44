//! Generate scaled networks from the staged corpus and compare them.
//!
//!     cargo run -p tornet --example generate_network [SCALE]

use std::collections::BTreeSet;
use std::path::Path;

use tornet::netgen::{generate, load_map, Role, ScaleParams};
use tornet::pipeline::cmd_stage;
use tornet::traffic::derive_seed;

fn main() -> tornet::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let scale: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.035);
    let staged = cmd_stage(
        &fixtures.join("corpus/snapshots.jsonl"),
        &fixtures.join("corpus/descriptors.jsonl"),
        &fixtures.join("corpus/users.jsonl"),
        &std::env::temp_dir().join("tornet-staged.json"),
    )?;
    let map = load_map(&fixtures.join("map.graphml"))?;

    let mut sets = Vec::new();
    for i in 0..3 {
        let params = ScaleParams {
            scale,
            load: 1.0,
            process_scale: 0.005,
            seed: derive_seed(42, &[i]),
        };
        let config = generate(&staged, &map, &params)?;
        let roles = config.role_counts();
        println!(
            "network {i}: {} hosts, positions {:?}, {} markov clients (tau {:.1}), {} perf clients, {} servers",
            config.hosts.len(),
            config.position_counts(),
            roles.get(&Role::MarkovClient).unwrap_or(&0),
            config.params.tau,
            roles.get(&Role::PerfClient).unwrap_or(&0),
            roles.get(&Role::Server).unwrap_or(&0),
        );
        let fps: BTreeSet<String> = config
            .hosts_with_role(Role::Relay)
            .filter_map(|h| h.relay.as_ref().map(|r| r.fp.clone()))
            .collect();
        sets.push(fps);
    }
    // Independently sampled networks share some relays but not all.
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        println!("networks {a} and {b} share {} relays", sets[a].intersection(&sets[b]).count());
    }
    Ok(())
}
