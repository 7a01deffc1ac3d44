use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::map::InternetMap;
use super::params::{
    client_bandwidth, compute_traffic_params, count_auxiliary_hosts, scaled_count, ScaleParams,
    TrafficParams,
};
use super::place::{place_clients, place_relay};
use super::sample::{sample_full_network, subsample_position, SampledRelay};
use crate::error::{Error, Result};
use crate::staging::{check_version, versioned_value, Position, StagedModel};
use crate::traffic::{seeded_rng, SeedRole};

pub const CONFIG_VERSION: &str = "tornet-config/1";

/// Benchmark download sizes in bytes: 50 KiB, 1 MiB, 5 MiB.
pub const PERF_SIZES: [u64; 3] = [50 * 1024, 1024 * 1024, 5 * 1024 * 1024];
/// Timeouts matching `PERF_SIZES`, seconds.
pub const PERF_TIMEOUTS_S: [f64; 3] = [15.0, 60.0, 120.0];
/// Pause between benchmark downloads, seconds.
pub const PERF_INTERVAL_S: f64 = 60.0;
/// Access bandwidth of directory authorities, bits/s.
const DIRAUTH_BANDWIDTH: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Relay,
    Dirauth,
    MarkovClient,
    PerfClient,
    Server,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaySpec {
    pub fp: String,
    pub guard: bool,
    pub exit: bool,
    /// Bytes/s.
    pub capacity: f64,
    /// Token bucket rate, bytes/s.
    pub rate: f64,
    /// Token bucket burst, bytes.
    pub burst: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovSpec {
    pub cc: String,
    pub tau: f64,
    pub users: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfSpec {
    pub interval_s: f64,
    pub sizes: Vec<u64>,
    pub timeouts_s: Vec<f64>,
}

impl Default for PerfSpec {
    fn default() -> Self {
        Self {
            interval_s: PERF_INTERVAL_S,
            sizes: PERF_SIZES.to_vec(),
            timeouts_s: PERF_TIMEOUTS_S.to_vec(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ServerSpec {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HostSpec {
    pub name: String,
    pub role: Role,
    pub city: String,
    /// Bits/s.
    pub bw_up: u64,
    /// Bits/s.
    pub bw_down: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relay: Option<RelaySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub markov: Option<MarkovSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perf: Option<PerfSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub server: Option<ServerSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigParams {
    pub s: f64,
    pub load: f64,
    pub pscale: f64,
    pub seed: u64,
    pub u: u64,
    pub c: f64,
    pub clients: u64,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub params: ConfigParams,
    /// Source of the Internet map the hosts were placed on.
    pub map: String,
    pub hosts: Vec<HostSpec>,
}

impl NetworkConfig {
    pub fn hosts_with_role(&self, role: Role) -> impl Iterator<Item = &HostSpec> {
        self.hosts.iter().filter(move |h| h.role == role)
    }

    pub fn role_counts(&self) -> BTreeMap<Role, usize> {
        let mut counts = BTreeMap::new();
        for h in &self.hosts {
            *counts.entry(h.role).or_default() += 1;
        }
        counts
    }

    /// Relay counts per position (directory authorities excluded).
    pub fn position_counts(&self) -> BTreeMap<Position, usize> {
        let mut counts: BTreeMap<Position, usize> = Position::ALL.iter().map(|&p| (p, 0)).collect();
        for r in self.hosts_with_role(Role::Relay).filter_map(|h| h.relay.as_ref()) {
            *counts
                .get_mut(&crate::staging::classify_position(r.guard, r.exit))
                .unwrap() += 1;
        }
        counts
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(&versioned_value(self, CONFIG_VERSION)?)
            .map_err(|e| Error::Schema(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::parse(context, e))?;
        let value = check_version(value, CONFIG_VERSION)?;
        serde_json::from_value(value).map_err(|e| Error::parse(context, e))
    }

    /// Hex SHA-256 of the serialized document.
    pub fn hash(&self) -> Result<String> {
        Ok(hex_digest(self.to_json()?.as_bytes()))
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_config(config: &NetworkConfig, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, config.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn read_config(path: &Path) -> Result<NetworkConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    NetworkConfig::from_json(&text, &path.display().to_string())
}

/// Picks the relays of a scaled network: m_ρ = scaled_count(C_ρ, s) per
/// position, bucketed-median subsampled from the sampled full network.
///
/// A position whose sampled population is smaller than m_ρ (possible since
/// flags are random) contributes its whole population.
pub fn select_relays(
    staged: &StagedModel,
    sampled: Vec<SampledRelay>,
    scale: f64,
) -> Result<Vec<SampledRelay>> {
    let mut by_position: BTreeMap<Position, Vec<SampledRelay>> = BTreeMap::new();
    for r in sampled {
        by_position.entry(r.position()).or_default().push(r);
    }
    let mut selected = Vec::new();
    for pos in Position::ALL {
        let population = by_position.remove(&pos).unwrap_or_default();
        let wanted = scaled_count(staged.position_counts.get(&pos).copied().unwrap_or(0), scale) as usize;
        let m = wanted.min(population.len());
        if m < wanted {
            log::warn!(
                "position {pos}: wanted {wanted} relays but only {} were sampled",
                population.len()
            );
        }
        if m > 0 {
            selected.extend(subsample_position(&population, m)?);
        }
    }
    Ok(selected)
}

/// Builds a network configuration. Pure in (staged, map, params).
pub fn generate(staged: &StagedModel, map: &InternetMap, params: &ScaleParams) -> Result<NetworkConfig> {
    params.validate()?;
    let TrafficParams {
        users,
        circuits,
        clients,
        tau,
    } = compute_traffic_params(params.scale, params.load, params.process_scale)?;
    let aux = count_auxiliary_hosts(params.scale, clients);
    let seed = params.seed;

    let sampled = sample_full_network(staged, &mut seeded_rng(seed, &[SeedRole::RelaySample.id()]))?;
    let relays = select_relays(staged, sampled, params.scale)?;

    let cities = map.cities();
    let mut hosts = Vec::new();
    let mut place_rng = seeded_rng(seed, &[SeedRole::RelayPlace.id()]);
    for (i, r) in relays.iter().enumerate() {
        let city = place_relay(&r.relay.country, map, &mut place_rng)?;
        // Capacities stay strictly positive.
        let capacity = r.relay.b.max(1.0);
        let bits = (capacity * 8.0).round() as u64;
        hosts.push(HostSpec {
            name: format!("relay{i}"),
            role: Role::Relay,
            city: cities[city].id.clone(),
            bw_up: bits,
            bw_down: bits,
            relay: Some(RelaySpec {
                fp: r.relay.fingerprint.clone(),
                guard: r.guard,
                exit: r.exit,
                capacity,
                rate: r.relay.lambda.max(1.0),
                burst: r.relay.beta.max(1.0),
                weight: r.relay.w,
            }),
            markov: None,
            perf: None,
            server: None,
        });
    }

    let mut aux_rng = seeded_rng(seed, &[SeedRole::AuxPlace.id()]);
    let uniform = |rng: &mut crate::traffic::SimRng| {
        use rand::Rng;
        rng.random_range(0..cities.len())
    };
    if cities.is_empty() {
        return Err(Error::Schema("internet map has no cities".into()));
    }
    for i in 0..aux.dirauths {
        let city = uniform(&mut aux_rng);
        hosts.push(HostSpec {
            name: format!("dirauth{i}"),
            role: Role::Dirauth,
            city: cities[city].id.clone(),
            bw_up: DIRAUTH_BANDWIDTH,
            bw_down: DIRAUTH_BANDWIDTH,
            relay: Some(RelaySpec {
                fp: format!("dirauth{i}"),
                guard: false,
                exit: false,
                capacity: DIRAUTH_BANDWIDTH as f64 / 8.0,
                rate: DIRAUTH_BANDWIDTH as f64 / 8.0,
                burst: DIRAUTH_BANDWIDTH as f64 / 8.0,
                weight: 0.0,
            }),
            markov: None,
            perf: None,
            server: None,
        });
    }

    let client_cities = place_clients(
        &staged.user_probs,
        map,
        clients as usize,
        &mut seeded_rng(seed, &[SeedRole::ClientPlace.id()]),
    )?;
    let client_bw = client_bandwidth(params.process_scale);
    for (i, &city) in client_cities.iter().enumerate() {
        hosts.push(HostSpec {
            name: format!("markov{i}"),
            role: Role::MarkovClient,
            city: cities[city].id.clone(),
            bw_up: client_bw,
            bw_down: client_bw,
            relay: None,
            markov: Some(MarkovSpec {
                cc: cities[city].country.clone(),
                tau,
                users: 1.0 / params.process_scale,
            }),
            perf: None,
            server: None,
        });
    }
    for i in 0..aux.perf_clients {
        let city = &cities[uniform(&mut aux_rng)];
        hosts.push(HostSpec {
            name: format!("perf{i}"),
            role: Role::PerfClient,
            city: city.id.clone(),
            bw_up: city.bandwidth_up,
            bw_down: city.bandwidth_down,
            relay: None,
            markov: None,
            perf: Some(PerfSpec::default()),
            server: None,
        });
    }
    // At least one server so that clients have a destination.
    for i in 0..aux.servers.max(1) {
        let city = &cities[uniform(&mut aux_rng)];
        hosts.push(HostSpec {
            name: format!("server{i}"),
            role: Role::Server,
            city: city.id.clone(),
            bw_up: city.bandwidth_up,
            bw_down: city.bandwidth_down,
            relay: None,
            markov: None,
            perf: None,
            server: Some(ServerSpec {}),
        });
    }

    Ok(NetworkConfig {
        params: ConfigParams {
            s: params.scale,
            load: params.load,
            pscale: params.process_scale,
            seed,
            u: users,
            c: circuits,
            clients,
            tau,
        },
        map: map.source.clone(),
        hosts,
    })
}
