//! Stage the bundled corpus and summarize the resulting model.
//!
//!     cargo run -p tornet --example stage_corpus [OUT.json]

use std::path::{Path, PathBuf};

use tornet::pipeline::cmd_stage;

fn main() -> tornet::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("tornet-staged.json"));

    let model = cmd_stage(
        &fixtures.join("snapshots.jsonl"),
        &fixtures.join("descriptors.jsonl"),
        &fixtures.join("users.jsonl"),
        &out,
    )?;

    println!("{} snapshots, {} relays seen", model.consensus_count, model.relays.len());
    for (pos, count) in &model.position_counts {
        println!("  {pos}: median count {count:>4}, median weight {:.3}", model.position_weights[pos]);
    }
    let top = model.user_probs.iter().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    println!("most users in {} ({:.1}%)", top.0, 100.0 * top.1);
    println!("wrote {}", out.display());
    Ok(())
}
