//! Scale parameters and the arithmetic that turns them into host counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::round_half_up;

/// Simultaneously active users in the full-scale network.
pub const ACTIVE_USERS: f64 = 792_000.0;
/// Active circuits per 10 minutes in the full-scale network.
pub const ACTIVE_CIRCUITS: f64 = 1_490_000.0;
pub const DIRECTORY_AUTHORITIES: usize = 3;
/// Markov clients per server host.
const CLIENTS_PER_SERVER: f64 = 10.0;
/// Users per benchmark client.
const USERS_PER_PERF_CLIENT: f64 = 1000.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    /// Network scale in (0, 1].
    pub scale: f64,
    /// Load factor, ≥ 0.
    pub load: f64,
    /// Process scale in (0, 1].
    pub process_scale: f64,
    pub seed: u64,
}

impl ScaleParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return Err(Error::InvalidParam(format!("scale {} not in (0,1]", self.scale)));
        }
        if !(self.load >= 0.0 && self.load.is_finite()) {
            return Err(Error::InvalidParam(format!("load {} must be >= 0", self.load)));
        }
        if !(self.process_scale > 0.0 && self.process_scale <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "process scale {} not in (0,1]",
                self.process_scale
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrafficParams {
    /// Users to model.
    pub users: u64,
    /// Circuits per 10 minutes across all users.
    pub circuits: f64,
    /// Markov client processes.
    pub clients: u64,
    /// Circuits per client per 10 minutes.
    pub tau: f64,
}

/// m = round-half-up(s·C), floored at one when C ≥ 1.
pub fn scaled_count(count: u64, scale: f64) -> u64 {
    let m = round_half_up(scale * count as f64).max(0) as u64;
    if count >= 1 {
        m.max(1)
    } else {
        0
    }
}

pub fn compute_traffic_params(scale: f64, load: f64, process_scale: f64) -> Result<TrafficParams> {
    let users = round_half_up(scale * ACTIVE_USERS).max(0) as u64;
    let circuits = load * scale * ACTIVE_CIRCUITS;
    let processes = process_scale * users as f64;
    let clients = round_half_up(processes).max(0) as u64;
    if clients == 0 {
        return Err(Error::InvalidParam(format!(
            "scale {scale} with process scale {process_scale} yields zero client processes; \
             increase the process scale or the network scale"
        )));
    }
    Ok(TrafficParams {
        users,
        circuits,
        clients,
        tau: circuits / processes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxiliaryHosts {
    pub dirauths: usize,
    pub perf_clients: usize,
    pub servers: usize,
}

/// Directory authorities, benchmark clients and servers for a network.
///
/// Benchmark clients track one per thousand users and servers one per ten
/// Markov clients, both rounded half-up.
pub fn count_auxiliary_hosts(scale: f64, clients: u64) -> AuxiliaryHosts {
    AuxiliaryHosts {
        dirauths: DIRECTORY_AUTHORITIES,
        perf_clients: round_half_up(scale * ACTIVE_USERS / USERS_PER_PERF_CLIENT).max(0) as usize,
        servers: round_half_up(clients as f64 / CLIENTS_PER_SERVER).max(0) as usize,
    }
}

/// Access bandwidth for a Markov client host in bits/s: max(10/p Mbit/s, 1 Gbit/s).
pub fn client_bandwidth(process_scale: f64) -> u64 {
    let mbit = (10.0 / process_scale).max(1000.0);
    (mbit * 1e6).round() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traffic_at_ten_percent() {
        let t = compute_traffic_params(0.1, 1.0, 0.01).unwrap();
        assert_eq!(t.users, 79_200);
        assert_eq!(t.circuits, 149_000.0);
        assert_eq!(t.clients, 792);
        // 149000 / 792
        assert!((t.tau - 188.131_313_131_313_13).abs() < 1e-9);
    }

    #[test]
    fn traffic_at_thirty_percent() {
        assert_eq!(compute_traffic_params(0.3, 1.0, 0.01).unwrap().clients, 2376);
    }

    #[test]
    fn zero_load_means_no_circuits() {
        let t = compute_traffic_params(0.1, 0.0, 0.01).unwrap();
        assert_eq!(t.circuits, 0.0);
        assert_eq!(t.tau, 0.0);
    }

    #[test]
    fn zero_clients_is_an_error() {
        let err = compute_traffic_params(1e-6, 1.0, 1e-3).unwrap_err();
        assert!(err.to_string().contains("process scale"));
    }

    #[test]
    fn scaled_counts() {
        assert_eq!(scaled_count(3620, 0.3), 1086);
        assert_eq!(scaled_count(3620, 1.0), 3620);
        assert_eq!(scaled_count(0, 0.5), 0);
        assert_eq!(scaled_count(3, 0.01), 1);
    }

    #[test]
    fn auxiliary_hosts_match_composition_table() {
        let h = count_auxiliary_hosts(0.1, 792);
        assert_eq!((h.dirauths, h.perf_clients, h.servers), (3, 79, 79));
        let h = count_auxiliary_hosts(0.3, 2376);
        assert_eq!((h.perf_clients, h.servers), (238, 238));
        let h = count_auxiliary_hosts(0.01, 100);
        assert_eq!((h.perf_clients, h.servers), (8, 10));
    }

    #[test]
    fn client_bandwidths() {
        assert_eq!(client_bandwidth(0.01), 1_000_000_000);
        assert_eq!(client_bandwidth(0.001), 10_000_000_000);
        assert_eq!(client_bandwidth(1.0), 1_000_000_000);
    }
}
