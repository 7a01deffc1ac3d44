use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use super::plan::{write_plan, ExperimentPlan};
use crate::error::{Error, Result};
use crate::netgen::{generate, load_map, read_config, write_config, ScaleParams};
use crate::sim::{self, write_goodput_csv, write_metrics_csv, TrafficModels};
use crate::staging::{self, load_descriptors, load_snapshots, load_user_counts, read_staged, write_staged, StagedModel};
use crate::stats::{RunManifest, RunStatus};
use crate::traffic::{default_models, derive_seed, load_model};
use crate::util;

pub const RUN_MANIFEST: &str = "manifest.json";
pub const METRICS_FILE: &str = "metrics.csv";
pub const GOODPUT_FILE: &str = "goodput.csv";

fn require_exists(path: &Path, what: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::Usage(format!("{what} {} does not exist", path.display())))
    }
}

/// Stages the raw inputs into `out`. Identical inputs give identical bytes.
pub fn cmd_stage(snapshots: &Path, descriptors: &Path, users: &Path, out: &Path) -> Result<StagedModel> {
    require_exists(snapshots, "snapshot input")?;
    require_exists(descriptors, "descriptor input")?;
    require_exists(users, "user count input")?;
    let model = staging::stage(
        &load_snapshots(snapshots)?,
        &load_descriptors(descriptors)?,
        &load_user_counts(users)?,
    )?;
    write_staged(&model, out)?;
    info!(
        "staged {} relays from {} snapshots into {}",
        model.relays.len(),
        model.consensus_count,
        out.display()
    );
    Ok(model)
}

/// Network-level record written next to each generated configuration.
#[derive(Debug, serde::Serialize, serde::Deserialize)]
pub struct NetworkManifest {
    pub network: usize,
    pub seed: u64,
    pub config_hash: String,
    pub hosts: usize,
}

/// Writes the plan and generates `plan.networks` configurations, network i
/// seeded from the master seed and i.
pub fn cmd_generate(plan: &ExperimentPlan) -> Result<Vec<PathBuf>> {
    plan.validate()?;
    require_exists(&plan.staged, "staged model")?;
    require_exists(&plan.map, "map")?;
    let staged = read_staged(&plan.staged)?;
    let map = load_map(&plan.map)?;
    write_plan(plan)?;
    let mut paths = Vec::with_capacity(plan.networks);
    for i in 0..plan.networks {
        let seed = derive_seed(plan.seed, &[i as u64]);
        let params = ScaleParams {
            scale: plan.scale,
            load: plan.load,
            process_scale: plan.pscale,
            seed,
        };
        let config = generate(&staged, &map, &params)?;
        let path = plan.config_path(i);
        write_config(&config, &path)?;
        let manifest = NetworkManifest {
            network: i,
            seed,
            config_hash: config.hash()?,
            hosts: config.hosts.len(),
        };
        util::write_json(&manifest, &plan.network_dir(i).join(RUN_MANIFEST))?;
        info!("network {i}: {} hosts -> {}", config.hosts.len(), path.display());
        paths.push(path);
    }
    Ok(paths)
}

pub fn load_models(plan: &ExperimentPlan) -> Result<TrafficModels> {
    let (stream, packet) = default_models();
    Ok(TrafficModels {
        stream: plan.stream_model.as_deref().map(load_model).transpose()?.unwrap_or(stream),
        packet: plan.packet_model.as_deref().map(load_model).transpose()?.unwrap_or(packet),
    })
}

fn simulate_one(plan: &ExperimentPlan, models: &TrafficModels, i: usize, j: usize, seed: u64) -> Result<String> {
    let config = read_config(&plan.config_path(i))?;
    let map = load_map(&plan.map)?;
    let record = sim::run(&config, &map, models, plan.duration_s, seed)?;
    let dir = plan.run_dir(i, j);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_metrics_csv(&record, &dir.join(METRICS_FILE))?;
    write_goodput_csv(&record, &dir.join(GOODPUT_FILE))?;
    config.hash()
}

/// Runs every (network, sim) pair with at most `parallelism` runs at once.
///
/// Each run writes its metrics and manifest under `net-<i>/sim-<j>/`. A
/// failing run is recorded as failed without affecting the others; the
/// combined list is also written to `runs.json`.
pub fn cmd_simulate(plan: &ExperimentPlan, parallelism: usize) -> Result<Vec<RunManifest>> {
    plan.validate()?;
    let models = load_models(plan)?;
    let jobs: Vec<(usize, usize)> = (0..plan.networks)
        .flat_map(|i| (0..plan.sims_per_net).map(move |j| (i, j)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Simulation(e.to_string()))?;
    let manifests: Vec<RunManifest> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, j)| {
                let seed = derive_seed(plan.seed, &[i as u64, j as u64]);
                let outcome = catch_unwind(AssertUnwindSafe(|| simulate_one(plan, &models, i, j, seed)))
                    .unwrap_or_else(|_| Err(Error::Simulation("simulation panicked".into())));
                let (status, config_hash, error) = match outcome {
                    Ok(hash) => (RunStatus::Ok, hash, None),
                    Err(e) => {
                        warn!("network {i} sim {j} failed: {e}");
                        (RunStatus::Failed, String::new(), Some(e.to_string()))
                    }
                };
                RunManifest {
                    network: i,
                    sim: j,
                    seed,
                    config_hash,
                    duration_s: plan.duration_s,
                    metrics: METRICS_FILE.into(),
                    goodput: GOODPUT_FILE.into(),
                    status,
                    error,
                }
            })
            .collect()
    });
    for m in &manifests {
        util::write_json(m, &plan.run_dir(m.network, m.sim).join(RUN_MANIFEST))?;
    }
    util::write_json(&manifests, &plan.out.join("runs.json"))?;
    Ok(manifests)
}

/// Reads the run manifests of every (network, sim) pair in the plan.
pub fn read_run_manifests(plan: &ExperimentPlan) -> Result<Vec<RunManifest>> {
    let mut out = Vec::new();
    for i in 0..plan.networks {
        for j in 0..plan.sims_per_net {
            out.push(util::read_json(&plan.run_dir(i, j).join(RUN_MANIFEST))?);
        }
    }
    Ok(out)
}
