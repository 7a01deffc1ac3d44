//! Grouping simulation runs by the network they were run in.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

/// Record of one simulation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub network: usize,
    pub sim: usize,
    pub seed: u64,
    pub config_hash: String,
    pub duration_s: f64,
    /// Paths relative to the run directory.
    pub metrics: String,
    pub goodput: String,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Groups successful runs by network index, each group sorted by sim index.
///
/// Fails on a network index outside `0..n_networks`, a repeated (network,
/// sim) pair, or a network left without any successful run.
pub fn group_runs(manifests: &[RunManifest], n_networks: usize) -> Result<Vec<Vec<RunManifest>>> {
    let mut groups = vec![Vec::new(); n_networks];
    let mut seen = BTreeSet::new();
    for m in manifests {
        if m.network >= n_networks {
            return Err(Error::InvalidParam(format!(
                "run manifest names unknown network {} (plan has {n_networks})",
                m.network
            )));
        }
        if !seen.insert((m.network, m.sim)) {
            return Err(Error::InvalidParam(format!(
                "duplicate run manifest for network {} sim {}",
                m.network, m.sim
            )));
        }
        if m.status == RunStatus::Ok {
            groups[m.network].push(m.clone());
        }
    }
    for (i, g) in groups.iter_mut().enumerate() {
        if g.is_empty() {
            return Err(Error::Empty(format!("network {i} has no successful simulations")));
        }
        g.sort_by_key(|m| m.sim);
    }
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(network: usize, sim: usize) -> RunManifest {
        RunManifest {
            network,
            sim,
            seed: 0,
            config_hash: String::new(),
            duration_s: 60.0,
            metrics: "metrics.csv".into(),
            goodput: "goodput.csv".into(),
            status: RunStatus::Ok,
            error: None,
        }
    }

    #[test]
    fn one_sim_per_network() {
        let runs: Vec<_> = (0..3).map(|i| run(i, 0)).collect();
        let g = group_runs(&runs, 3).unwrap();
        assert_eq!(g.iter().map(Vec::len).collect::<Vec<_>>(), [1, 1, 1]);
    }

    #[test]
    fn three_by_three() {
        let mut runs = Vec::new();
        for j in (0..3).rev() {
            for i in 0..3 {
                runs.push(run(i, j));
            }
        }
        let g = group_runs(&runs, 3).unwrap();
        for (i, group) in g.iter().enumerate() {
            assert_eq!(group.len(), 3);
            assert!(group.iter().all(|m| m.network == i));
            assert_eq!(group.iter().map(|m| m.sim).collect::<Vec<_>>(), [0, 1, 2]);
        }
    }

    #[test]
    fn unknown_network_is_rejected() {
        assert!(group_runs(&[run(0, 0), run(5, 0)], 2).is_err());
    }

    #[test]
    fn duplicates_and_empty_groups_are_rejected() {
        assert!(group_runs(&[run(0, 0), run(0, 0)], 1).is_err());
        let mut failed = run(1, 0);
        failed.status = RunStatus::Failed;
        assert!(group_runs(&[run(0, 0), failed], 2).is_err());
    }
}
