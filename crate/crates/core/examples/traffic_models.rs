//! Sample circuit arrivals and Markov walks from the built-in traffic models.
//!
//!     cargo run -p tornet --example traffic_models

use tornet::netgen::compute_traffic_params;
use tornet::traffic::{default_models, seeded_rng, CircuitProcess, EventKind, SeedRole, DEFAULT_BUDGET};

fn main() -> tornet::Result<()> {
    let params = compute_traffic_params(0.1, 1.0, 0.01)?;
    println!(
        "10% network: {} users, {} client processes, tau = {:.4} circuits per 10 min",
        params.users, params.clients, params.tau
    );

    let process = CircuitProcess::new(params.tau);
    let mut rng = seeded_rng(1, &[0, SeedRole::CircuitArrivals.id()]);
    let delays: Vec<f64> = (0..10_000).filter_map(|_| process.next_delay(&mut rng)).collect();
    let mean = delays.iter().sum::<f64>() / delays.len() as f64 / 1e6;
    println!("mean inter-circuit delay {mean:.3} s (expected {:.3} s)", process.mean_delay_us() / 1e6);

    let (stream, packet) = default_models();
    let mut rng = seeded_rng(1, &[0, SeedRole::StreamModel.id()]);
    for k in 0..3 {
        let walk = stream.walk(&mut rng, DEFAULT_BUDGET);
        println!(
            "stream walk {k}: {} streams over {:.1} s",
            walk.count(EventKind::StreamCreate),
            walk.total_delay_us() / 1e6
        );
    }
    let mut rng = seeded_rng(1, &[0, SeedRole::PacketModel.id()]);
    let walk = packet.walk(&mut rng, DEFAULT_BUDGET);
    println!(
        "packet walk: {} packets to server, {} to client, {:.2} s",
        walk.count(EventKind::PacketToServer),
        walk.count(EventKind::PacketToClient),
        walk.total_delay_us() / 1e6
    );
    Ok(())
}
