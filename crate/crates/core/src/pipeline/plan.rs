use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::staging::{check_version, versioned_value};
use crate::util;

pub const PLAN_VERSION: &str = "tornet-plan/1";
pub const PLAN_FILE: &str = "plan.json";

/// Everything needed to reproduce an experiment from its inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub staged: PathBuf,
    pub map: PathBuf,
    pub scale: f64,
    pub load: f64,
    pub pscale: f64,
    pub networks: usize,
    pub sims_per_net: usize,
    pub duration_s: f64,
    pub warmup_s: f64,
    pub seed: u64,
    pub out: PathBuf,
    /// Optional Markov model documents replacing the built-in ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stream_model: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet_model: Option<PathBuf>,
}

impl ExperimentPlan {
    pub const DEFAULT_DURATION_S: f64 = 3600.0;
    pub const DEFAULT_WARMUP_S: f64 = 1200.0;

    /// A plan with one simulation per network and the default timing.
    pub fn new(staged: impl Into<PathBuf>, map: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        ExperimentPlan {
            staged: staged.into(),
            map: map.into(),
            scale: 0.01,
            load: 1.0,
            pscale: 0.01,
            networks: 1,
            sims_per_net: 1,
            duration_s: Self::DEFAULT_DURATION_S,
            warmup_s: Self::DEFAULT_WARMUP_S,
            seed: 1,
            out: out.into(),
            stream_model: None,
            packet_model: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.networks < 1 || self.sims_per_net < 1 {
            return Err(Error::InvalidParam("need at least one network and one simulation per network".into()));
        }
        if !(self.warmup_s >= 0.0 && self.warmup_s < self.duration_s && self.duration_s.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "warmup {} s must be nonnegative and shorter than duration {} s",
                self.warmup_s, self.duration_s
            )));
        }
        Ok(())
    }

    pub fn network_dir(&self, i: usize) -> PathBuf {
        self.out.join(format!("net-{i}"))
    }

    pub fn config_path(&self, i: usize) -> PathBuf {
        self.network_dir(i).join("config.json")
    }

    pub fn run_dir(&self, i: usize, j: usize) -> PathBuf {
        self.network_dir(i).join(format!("sim-{j}"))
    }

    pub fn analysis_dir(&self) -> PathBuf {
        self.out.join("analysis")
    }
}

pub fn write_plan(plan: &ExperimentPlan) -> Result<PathBuf> {
    let path = plan.out.join(PLAN_FILE);
    util::write_json(&versioned_value(plan, PLAN_VERSION)?, &path)?;
    Ok(path)
}

/// Reads `<dir>/plan.json`.
pub fn read_plan(dir: &Path) -> Result<ExperimentPlan> {
    let path = dir.join(PLAN_FILE);
    let value: serde_json::Value = util::read_json(&path)?;
    let value = check_version(value, PLAN_VERSION)?;
    let plan: ExperimentPlan =
        serde_json::from_value(value).map_err(|e| Error::parse(path.display().to_string(), e))?;
    plan.validate()?;
    Ok(plan)
}
