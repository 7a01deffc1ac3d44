//! Network generation: turn a staged model and an Internet map into a
//! concrete scaled network configuration.

mod config;
mod map;
mod params;
mod place;
mod sample;

pub use config::{
    generate, read_config, select_relays, write_config, ConfigParams, HostSpec, MarkovSpec,
    NetworkConfig, PerfSpec, RelaySpec, Role, ServerSpec, CONFIG_VERSION, PERF_INTERVAL_S,
    PERF_SIZES, PERF_TIMEOUTS_S,
};
pub use map::{load_map, parse_graphml, City, InternetMap, MapEdge};
pub use params::{
    client_bandwidth, compute_traffic_params, count_auxiliary_hosts, scaled_count, AuxiliaryHosts,
    ScaleParams, TrafficParams, ACTIVE_CIRCUITS, ACTIVE_USERS, DIRECTORY_AUTHORITIES,
};
pub use place::{place_clients, place_relay};
pub use sample::{
    bucket_sizes, sample_full_network, subsample_position, weighted_sample_without_replacement,
    SampledRelay,
};
