//! The event loop: circuits, streams and downloads as fluid flows over
//! relays and host links, with max-min sharing and per-second token refill.

use std::collections::{BTreeMap, BTreeSet};

use log::{debug, warn};
use rand::Rng;

use super::bucket::RelayBucket;
use super::circuit::{build_circuit, path_rtt, RelayCandidate};
use super::clock::SimClock;
use super::maxmin::MaxMinSolver;
use super::metrics::{quantize_down, quantize_up, DownloadKind, DownloadRecord, MetricsRecord, Outcome};
use crate::error::{Error, Result};
use crate::netgen::{InternetMap, NetworkConfig, Role};
use crate::traffic::{
    default_models, seeded_rng, CircuitProcess, EventKind, MarkovModel, SeedRole, SimRng, DEFAULT_BUDGET,
    DEFAULT_PACKET_BYTES,
};

const US: f64 = 1e6;
/// A Markov stream with no progress for this long times out.
pub const STREAM_IDLE_TIMEOUT_S: f64 = 300.0;
/// A Markov stream still open this long after it started times out.
pub const STREAM_MAX_LIFETIME_S: f64 = 600.0;
/// Remaining bytes below this count as delivered.
const DONE_EPSILON: f64 = 1e-3;

/// Stream and packet models driving the Markov clients.
#[derive(Clone, Debug)]
pub struct TrafficModels {
    pub stream: MarkovModel,
    pub packet: MarkovModel,
}

impl Default for TrafficModels {
    fn default() -> Self {
        let (stream, packet) = default_models();
        TrafficModels { stream, packet }
    }
}

#[derive(Debug)]
enum Event {
    Tick,
    Circuit { client: usize },
    Stream { stream: usize },
    Perf { client: usize },
    FlowStart { flow: usize },
    Deadline { download: usize },
    Completion { generation: u64 },
}

struct Relay {
    link: f64,
    bucket: RelayBucket,
    cap: f64,
    element: usize,
    city: usize,
}

struct Endpoint {
    host: usize,
    city: usize,
    up: usize,
    down: usize,
}

struct Client {
    endpoint: Endpoint,
    arrivals: SimRng,
    paths: SimRng,
    streams: SimRng,
    packets: SimRng,
    servers: SimRng,
    process: Option<CircuitProcess>,
    perf_next: usize,
}

struct PendingStream {
    client: usize,
    path: [usize; 3],
    server: usize,
    rtt_us: u64,
    up_bytes: f64,
    down_bytes: f64,
    duration_s: f64,
}

struct Flow {
    download: usize,
    elements: [usize; 5],
    cap: f64,
    total: f64,
    done: f64,
    rate: f64,
    relays: [usize; 3],
    state: FlowState,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum FlowState {
    Pending,
    Active,
    Finished,
}

struct Download {
    kind: DownloadKind,
    client: usize,
    start_us: u64,
    first_byte_us: Option<u64>,
    last_progress_us: u64,
    flows: Vec<usize>,
    open_flows: usize,
    outcome: Option<(Outcome, u64)>,
}

struct Engine<'a> {
    config: &'a NetworkConfig,
    map: &'a InternetMap,
    models: &'a TrafficModels,
    clock: SimClock<Event>,
    end_us: u64,
    relays: Vec<Relay>,
    candidates: Vec<RelayCandidate>,
    clients: Vec<Client>,
    servers: Vec<Endpoint>,
    base_caps: Vec<f64>,
    streams: Vec<Option<PendingStream>>,
    flows: Vec<Flow>,
    active: BTreeSet<usize>,
    downloads: Vec<Download>,
    open_markov: BTreeSet<usize>,
    goodput_bytes: Vec<f64>,
    errors: BTreeMap<String, u64>,
    generation: u64,
    last_advance_us: u64,
    solver: MaxMinSolver,
    caps: Vec<f64>,
    rates: Vec<f64>,
}

/// Simulates `config` for `duration_s` seconds. The result depends only on
/// the arguments.
pub fn run(
    config: &NetworkConfig,
    map: &InternetMap,
    models: &TrafficModels,
    duration_s: f64,
    seed: u64,
) -> Result<MetricsRecord> {
    if !(duration_s >= 0.0) || !duration_s.is_finite() {
        return Err(Error::InvalidParam(format!("duration must be a nonnegative number, got {duration_s}")));
    }
    let mut engine = Engine::new(config, map, models, duration_s, seed)?;
    engine.run();
    Ok(engine.finish())
}

fn host_city(map: &InternetMap, name: &str, city: &str) -> Result<usize> {
    map.city_index(city)
        .ok_or_else(|| Error::Schema(format!("host {name} is placed in unknown city {city:?}")))
}

impl<'a> Engine<'a> {
    fn new(
        config: &'a NetworkConfig,
        map: &'a InternetMap,
        models: &'a TrafficModels,
        duration_s: f64,
        seed: u64,
    ) -> Result<Self> {
        let end_us = (duration_s * US).round() as u64;
        let mut base_caps = Vec::new();
        let mut relays = Vec::new();
        let mut candidates = Vec::new();
        let mut clients = Vec::new();
        let mut servers = Vec::new();
        let endpoint = |host: usize, city: usize, up: f64, down: f64, caps: &mut Vec<f64>| {
            caps.push(up);
            caps.push(down);
            Endpoint {
                host,
                city,
                up: caps.len() - 2,
                down: caps.len() - 1,
            }
        };
        for (h, host) in config.hosts.iter().enumerate() {
            let city = host_city(map, &host.name, &host.city)?;
            let up = host.bw_up as f64 / 8.0;
            let down = host.bw_down as f64 / 8.0;
            let rng = |role: SeedRole| seeded_rng(seed, &[role.id(), h as u64]);
            match host.role {
                Role::Relay => {
                    let spec = host
                        .relay
                        .as_ref()
                        .ok_or_else(|| Error::Schema(format!("relay host {} lacks relay settings", host.name)))?;
                    let bucket = RelayBucket::new(spec.rate, spec.burst);
                    let cap = bucket.capacity(spec.capacity);
                    base_caps.push(cap);
                    relays.push(Relay {
                        link: spec.capacity,
                        bucket,
                        cap,
                        element: base_caps.len() - 1,
                        city,
                    });
                    candidates.push(RelayCandidate {
                        guard: spec.guard,
                        exit: spec.exit,
                        weight: spec.weight,
                    });
                }
                Role::Dirauth => {}
                Role::MarkovClient | Role::PerfClient => {
                    let process = match (&host.role, &host.markov, &host.perf) {
                        (Role::MarkovClient, Some(m), _) => Some(CircuitProcess::new(m.tau)),
                        (Role::PerfClient, _, Some(p)) => {
                            if p.sizes.is_empty() || p.sizes.len() != p.timeouts_s.len() || !(p.interval_s > 0.0) {
                                return Err(Error::Schema(format!("perf client {} has inconsistent settings", host.name)));
                            }
                            if let Some(bad) = p.sizes.iter().find(|&&s| DownloadKind::for_size(s).is_none()) {
                                return Err(Error::Schema(format!("perf client {}: unsupported size {bad}", host.name)));
                            }
                            None
                        }
                        _ => return Err(Error::Schema(format!("client host {} lacks its settings", host.name))),
                    };
                    clients.push(Client {
                        endpoint: endpoint(h, city, up, down, &mut base_caps),
                        arrivals: rng(SeedRole::CircuitArrivals),
                        paths: rng(SeedRole::PathSelect),
                        streams: rng(SeedRole::StreamModel),
                        packets: rng(SeedRole::PacketModel),
                        servers: rng(SeedRole::ServerChoice),
                        process,
                        perf_next: 0,
                    });
                }
                Role::Server => servers.push(endpoint(h, city, up, down, &mut base_caps)),
            }
        }
        let mut engine = Engine {
            config,
            map,
            models,
            clock: SimClock::new(),
            end_us,
            relays,
            candidates,
            clients,
            servers,
            base_caps,
            streams: Vec::new(),
            flows: Vec::new(),
            active: BTreeSet::new(),
            downloads: Vec::new(),
            open_markov: BTreeSet::new(),
            goodput_bytes: vec![0.0; (end_us as f64 / US).ceil() as usize],
            errors: BTreeMap::new(),
            generation: 0,
            last_advance_us: 0,
            solver: MaxMinSolver::default(),
            caps: Vec::new(),
            rates: Vec::new(),
        };
        engine.schedule_initial(seed);
        Ok(engine)
    }

    fn schedule_initial(&mut self, seed: u64) {
        if self.end_us >= 1_000_000 {
            self.clock.schedule(1_000_000, Event::Tick);
        }
        for c in 0..self.clients.len() {
            let host = &self.config.hosts[self.clients[c].endpoint.host];
            if let Some(process) = self.clients[c].process {
                if let Some(d) = process.next_delay(&mut self.clients[c].arrivals) {
                    self.clock.schedule(d.round() as u64, Event::Circuit { client: c });
                }
            } else if let Some(perf) = &host.perf {
                let mut rng = seeded_rng(seed, &[SeedRole::PerfSchedule.id(), self.clients[c].endpoint.host as u64]);
                let offset = rng.random::<f64>() * perf.interval_s;
                self.clock.schedule((offset * US).round() as u64, Event::Perf { client: c });
            }
        }
    }

    fn run(&mut self) {
        while let Some(t) = self.clock.peek_time() {
            if t > self.end_us {
                break;
            }
            let (t, event) = self.clock.pop().unwrap();
            self.advance(t);
            let changed = match event {
                Event::Tick => self.tick(t),
                Event::Circuit { client } => self.circuit(client, t),
                Event::Stream { stream } => self.stream(stream, t),
                Event::Perf { client } => self.perf(client, t),
                Event::FlowStart { flow } => self.start_flow(flow),
                Event::Deadline { download } => self.timeout(download, t),
                Event::Completion { generation } => generation == self.generation,
            };
            let finished = self.collect_finished(t);
            if changed || finished {
                self.reallocate(t);
            }
        }
    }

    /// Moves every active flow forward to `t` at its current rate.
    fn advance(&mut self, t: u64) {
        let dt = (t - self.last_advance_us) as f64 / US;
        if dt > 0.0 {
            let second = (self.last_advance_us / 1_000_000) as usize;
            for &f in &self.active {
                let flow = &mut self.flows[f];
                if flow.rate <= 0.0 {
                    continue;
                }
                let bytes = (flow.rate * dt).min(flow.total - flow.done);
                flow.done += bytes;
                self.downloads[flow.download].last_progress_us = t;
                for r in flow.relays {
                    self.relays[r].bucket.consume(bytes);
                }
                if let Some(g) = self.goodput_bytes.get_mut(second) {
                    *g += 3.0 * bytes;
                }
            }
        }
        self.last_advance_us = t;
    }

    fn tick(&mut self, t: u64) -> bool {
        for relay in &mut self.relays {
            relay.bucket.refill();
            relay.cap = relay.bucket.capacity(relay.link);
            self.base_caps[relay.element] = relay.cap;
        }
        let idle = (STREAM_IDLE_TIMEOUT_S * US) as u64;
        let stale: Vec<usize> = self
            .open_markov
            .iter()
            .copied()
            .filter(|&d| t - self.downloads[d].last_progress_us >= idle)
            .collect();
        for d in stale {
            self.timeout(d, t);
        }
        if t + 1_000_000 <= self.end_us {
            self.clock.schedule(t + 1_000_000, Event::Tick);
        }
        true
    }

    fn count_error(&mut self, kind: &str) {
        *self.errors.entry(kind.to_string()).or_default() += 1;
    }

    /// Builds a fresh circuit to a random server.
    fn open_circuit(&mut self, c: usize) -> Option<([usize; 3], usize, u64)> {
        if self.servers.is_empty() {
            self.count_error("no_server");
            return None;
        }
        let path = match build_circuit(&self.candidates, &mut self.clients[c].paths) {
            Ok(p) => p.relays(),
            Err(e) => {
                debug!("{e}");
                self.count_error("circuit");
                return None;
            }
        };
        let server = self.clients[c].servers.random_range(0..self.servers.len());
        let cities = [
            self.clients[c].endpoint.city,
            self.relays[path[0]].city,
            self.relays[path[1]].city,
            self.relays[path[2]].city,
            self.servers[server].city,
        ];
        Some((path, server, path_rtt(self.map, cities)))
    }

    fn circuit(&mut self, c: usize, t: u64) -> bool {
        if let Some(process) = self.clients[c].process {
            if let Some(d) = process.next_delay(&mut self.clients[c].arrivals) {
                self.clock.schedule(t + d.round() as u64, Event::Circuit { client: c });
            }
        }
        let Some((path, server, rtt_us)) = self.open_circuit(c) else {
            return false;
        };
        let walk = self.models.stream.walk(&mut self.clients[c].streams, DEFAULT_BUDGET);
        let mut offset = 0.0;
        for event in &walk.events {
            offset += event.delay_us;
            if event.kind != EventKind::StreamCreate {
                continue;
            }
            let start = t + offset.round() as u64;
            if start > self.end_us {
                break;
            }
            let packets = self.models.packet.walk(&mut self.clients[c].packets, DEFAULT_BUDGET);
            let bytes = |kind| (packets.count(kind) as u64 * DEFAULT_PACKET_BYTES) as f64;
            self.streams.push(Some(PendingStream {
                client: c,
                path,
                server,
                rtt_us,
                up_bytes: bytes(EventKind::PacketToServer),
                down_bytes: bytes(EventKind::PacketToClient),
                duration_s: packets.total_delay_us() / US,
            }));
            self.clock.schedule(start, Event::Stream { stream: self.streams.len() - 1 });
        }
        false
    }

    fn new_download(&mut self, kind: DownloadKind, client: usize, t: u64) -> usize {
        self.downloads.push(Download {
            kind,
            client,
            start_us: t,
            first_byte_us: None,
            last_progress_us: t,
            flows: Vec::new(),
            open_flows: 0,
            outcome: None,
        });
        self.downloads.len() - 1
    }

    #[allow(clippy::too_many_arguments)]
    fn add_flow(&mut self, download: usize, path: [usize; 3], from: usize, to: usize, bytes: f64, cap: f64, at: u64) {
        let elements = [
            from,
            self.relays[path[0]].element,
            self.relays[path[1]].element,
            self.relays[path[2]].element,
            to,
        ];
        self.flows.push(Flow {
            download,
            elements,
            cap,
            total: bytes,
            done: 0.0,
            rate: 0.0,
            relays: path,
            state: FlowState::Pending,
        });
        let f = self.flows.len() - 1;
        self.downloads[download].flows.push(f);
        self.downloads[download].open_flows += 1;
        self.clock.schedule(at, Event::FlowStart { flow: f });
    }

    fn stream(&mut self, s: usize, t: u64) -> bool {
        let Some(st) = self.streams[s].take() else {
            return false;
        };
        if st.up_bytes + st.down_bytes <= 0.0 {
            return false;
        }
        let d = self.new_download(DownloadKind::Markov, st.client, t);
        let cap = |bytes: f64| {
            if st.duration_s > 0.0 {
                bytes / st.duration_s
            } else {
                f64::INFINITY
            }
        };
        let client = (self.clients[st.client].endpoint.up, self.clients[st.client].endpoint.down);
        let server = (self.servers[st.server].up, self.servers[st.server].down);
        let at = t + st.rtt_us;
        if st.up_bytes > 0.0 {
            self.add_flow(d, st.path, client.0, server.1, st.up_bytes, cap(st.up_bytes), at);
        }
        if st.down_bytes > 0.0 {
            let path = [st.path[2], st.path[1], st.path[0]];
            self.add_flow(d, path, server.0, client.1, st.down_bytes, cap(st.down_bytes), at);
        }
        self.open_markov.insert(d);
        self.clock
            .schedule(t + (STREAM_MAX_LIFETIME_S * US) as u64, Event::Deadline { download: d });
        false
    }

    fn perf(&mut self, c: usize, t: u64) -> bool {
        let perf = self.config.hosts[self.clients[c].endpoint.host].perf.as_ref().unwrap();
        let (interval_s, sizes, timeouts) = (perf.interval_s, &perf.sizes, &perf.timeouts_s);
        let k = self.clients[c].perf_next % sizes.len();
        let (size, timeout_s) = (sizes[k], timeouts[k]);
        self.clients[c].perf_next += 1;
        self.clock.schedule(t + (interval_s * US).round() as u64, Event::Perf { client: c });

        let Some((path, server, rtt_us)) = self.open_circuit(c) else {
            return false;
        };
        let kind = DownloadKind::for_size(size).unwrap();
        let d = self.new_download(kind, c, t);
        let down_path = [path[2], path[1], path[0]];
        let (from, to) = (self.servers[server].up, self.clients[c].endpoint.down);
        self.add_flow(d, down_path, from, to, size as f64, f64::INFINITY, t + rtt_us);
        self.clock
            .schedule(t + (timeout_s * US).round() as u64, Event::Deadline { download: d });
        false
    }

    fn start_flow(&mut self, f: usize) -> bool {
        if self.flows[f].state != FlowState::Pending {
            return false;
        }
        self.flows[f].state = FlowState::Active;
        self.active.insert(f);
        true
    }

    fn close_flow(&mut self, f: usize) {
        self.flows[f].state = FlowState::Finished;
        self.flows[f].rate = 0.0;
        self.active.remove(&f);
    }

    fn timeout(&mut self, d: usize, t: u64) -> bool {
        if self.downloads[d].outcome.is_some() {
            return false;
        }
        for f in self.downloads[d].flows.clone() {
            if self.flows[f].state != FlowState::Finished {
                self.close_flow(f);
            }
        }
        self.downloads[d].open_flows = 0;
        self.downloads[d].outcome = Some((Outcome::Timeout, t));
        self.open_markov.remove(&d);
        true
    }

    fn collect_finished(&mut self, t: u64) -> bool {
        let done: Vec<usize> = self
            .active
            .iter()
            .copied()
            .filter(|&f| self.flows[f].total - self.flows[f].done <= DONE_EPSILON)
            .collect();
        for &f in &done {
            self.close_flow(f);
            let d = self.flows[f].download;
            let download = &mut self.downloads[d];
            download.open_flows -= 1;
            if download.open_flows == 0 && download.outcome.is_none() {
                download.outcome = Some((Outcome::Ok, t));
                self.open_markov.remove(&d);
            }
        }
        !done.is_empty()
    }

    fn reallocate(&mut self, t: u64) {
        self.caps.clear();
        self.caps.extend_from_slice(&self.base_caps);
        self.solver.clear();
        for &f in &self.active {
            let flow = &self.flows[f];
            if flow.cap.is_finite() {
                self.caps.push(flow.cap);
                let mut elems = [0; 6];
                elems[..5].copy_from_slice(&flow.elements);
                elems[5] = self.caps.len() - 1;
                self.solver.add_flow(&elems);
            } else {
                self.solver.add_flow(&flow.elements);
            }
        }
        let mut rates = std::mem::take(&mut self.rates);
        self.solver.solve(&self.caps, &mut rates);
        let mut next: Option<f64> = None;
        for (&f, &rate) in self.active.iter().zip(&rates) {
            let flow = &mut self.flows[f];
            flow.rate = rate;
            if rate > 0.0 {
                let download = &mut self.downloads[flow.download];
                download.first_byte_us.get_or_insert(t);
                let left = (flow.total - flow.done) / rate;
                next = Some(next.map_or(left, |n: f64| n.min(left)));
            }
        }
        self.rates = rates;
        self.generation += 1;
        if let Some(dt) = next {
            let at = t + ((dt * US).ceil() as u64).max(1);
            self.clock.schedule(at, Event::Completion { generation: self.generation });
        }
    }

    fn finish(self) -> MetricsRecord {
        let mut downloads = Vec::new();
        for d in &self.downloads {
            let Some((outcome, end)) = d.outcome else {
                continue;
            };
            let since = |t: u64| quantize_up((t - d.start_us) as f64 / US);
            let ttfb = d.first_byte_us.map(since);
            downloads.push(DownloadRecord {
                kind: d.kind,
                client: self.config.hosts[self.clients[d.client].endpoint.host].name.clone(),
                start_s: quantize_down(d.start_us as f64 / US),
                ttfb_s: ttfb,
                ttlb_s: (outcome == Outcome::Ok).then(|| since(end)),
                outcome,
            });
        }
        let open = self.downloads.iter().filter(|d| d.outcome.is_none()).count();
        if open > 0 {
            debug!("{open} downloads still open at the end of the run");
        }
        if !self.errors.is_empty() {
            warn!("simulation errors: {:?}", self.errors);
        }
        MetricsRecord {
            downloads,
            goodput_bits: self.goodput_bytes.iter().map(|b| (b * 8.0).round()).collect(),
            errors: self.errors,
        }
    }
}
