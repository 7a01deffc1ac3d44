//! How confidence-interval width shrinks as more networks are sampled.
//!
//!     cargo run --release -p tornet --example ci_width_study

use tornet::stats::{ci_width_study, DEFAULT_CONFIDENCE};

fn main() -> tornet::Result<()> {
    let ns: Vec<usize> = (2..=100).collect();
    let rows = ci_width_study(&ns, &[0.5, 0.9, 0.99], 1000, 1, DEFAULT_CONFIDENCE)?;
    println!("{:>4} {:>10} {:>10} {:>10}", "n", "P50", "P90", "P99");
    for n in [2, 3, 5, 10, 20, 50, 100] {
        let w: Vec<f64> = rows.iter().filter(|r| r.networks == n).map(|r| r.median_width).collect();
        println!("{n:>4} {:>10.3} {:>10.3} {:>10.3}", w[0], w[1], w[2]);
    }
    Ok(())
}
