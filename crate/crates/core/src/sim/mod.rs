//! Flow-level discrete-event simulation of a generated network.
//!
//! Transfers are fluid flows whose rates are recomputed by max-min fair
//! sharing whenever a flow starts or ends and at each one-second token
//! refill. Packet-level TCP behavior is not modeled.

mod bucket;
mod circuit;
mod clock;
mod engine;
mod maxmin;
mod metrics;

pub use bucket::RelayBucket;
pub use circuit::{build_circuit, hop_latency_us, path_rtt, CircuitPath, RelayCandidate, FALLBACK_LATENCY_US};
pub use clock::SimClock;
pub use engine::{run, TrafficModels, STREAM_IDLE_TIMEOUT_S, STREAM_MAX_LIFETIME_S};
pub use maxmin::max_min_allocate;
pub use metrics::{
    quantize_down, quantize_up, read_goodput_csv, read_metrics_csv, relay_goodput_series, write_goodput_csv,
    write_metrics_csv, DownloadKind, DownloadRecord, MetricsRecord, Outcome, TIME_RESOLUTION_S,
};
