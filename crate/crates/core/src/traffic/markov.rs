//! Markov models with per-state emissions.
//!
//! The document form lists states in order; the first state is the start
//! state. Visiting a state emits its emission (if any); visiting a terminal
//! state ends the walk.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dist::{DistributionSpec, Family};
use crate::error::{Error, Result};

/// Default cap on state visits per walk.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Bytes carried by one packet event.
pub const DEFAULT_PACKET_BYTES: u64 = 512;

/// Expected stream_create events per walk of the default stream model
/// (geometric with continuation probability 0.8).
pub const DEFAULT_MEAN_STREAMS_PER_CIRCUIT: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    StreamCreate,
    PacketToServer,
    PacketToClient,
    Delay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmissionDocument {
    pub kind: EventKind,
    #[serde(flatten)]
    pub dist: DistributionSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub name: String,
    #[serde(default)]
    pub terminal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emission: Option<EmissionDocument>,
    #[serde(default)]
    pub transitions: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub states: Vec<StateDocument>,
}

#[derive(Clone, Debug, PartialEq)]
struct State {
    name: String,
    terminal: bool,
    emission: Option<(EventKind, DistributionSpec)>,
    /// (target, cumulative probability)
    transitions: Vec<(usize, f64)>,
}

/// A validated, immutable Markov model.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovModel {
    states: Vec<State>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkEvent {
    pub kind: EventKind,
    /// Delay since the previous event, microseconds.
    pub delay_us: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Walk {
    pub events: Vec<WalkEvent>,
    /// The budget ran out before a terminal state was reached.
    pub truncated: bool,
}

impl Walk {
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn total_delay_us(&self) -> f64 {
        self.events.iter().map(|e| e.delay_us).sum()
    }
}

impl MarkovModel {
    pub fn from_document(doc: &ModelDocument) -> Result<Self> {
        let invalid = |msg: String| Err(Error::Schema(format!("markov model: {msg}")));
        if doc.states.is_empty() {
            return invalid("no states".into());
        }
        let mut index = HashMap::new();
        for (i, s) in doc.states.iter().enumerate() {
            if index.insert(s.name.as_str(), i).is_some() {
                return invalid(format!("duplicate state {:?}", s.name));
            }
        }
        let mut states = Vec::with_capacity(doc.states.len());
        for s in &doc.states {
            if s.terminal && !s.transitions.is_empty() {
                return invalid(format!("terminal state {:?} has transitions", s.name));
            }
            let mut cumulative = 0.0;
            let mut transitions = Vec::with_capacity(s.transitions.len());
            for (target, &p) in &s.transitions {
                let Some(&t) = index.get(target.as_str()) else {
                    return invalid(format!("{:?} -> unknown state {target:?}", s.name));
                };
                if !(0.0..=1.0).contains(&p) {
                    return invalid(format!("{:?} -> {target:?}: probability {p}", s.name));
                }
                cumulative += p;
                transitions.push((t, cumulative));
            }
            if !s.terminal && (cumulative - 1.0).abs() > 1e-9 {
                return invalid(format!("row {:?} sums to {cumulative}", s.name));
            }
            let emission = match &s.emission {
                Some(e) => {
                    e.dist.validate()?;
                    Some((e.kind, e.dist.clone()))
                }
                None => None,
            };
            states.push(State {
                name: s.name.clone(),
                terminal: s.terminal,
                emission,
                transitions,
            });
        }
        if !states.iter().any(|s| s.terminal) {
            return invalid("no terminal state".into());
        }
        let mut seen = vec![false; states.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for &(t, _) in &states[i].transitions {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        if let Some(i) = seen.iter().position(|&s| !s) {
            return invalid(format!("state {:?} unreachable from start", states[i].name));
        }
        Ok(Self { states })
    }

    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            states: self
                .states
                .iter()
                .map(|s| {
                    let mut prev = 0.0;
                    let transitions = s
                        .transitions
                        .iter()
                        .map(|&(t, c)| {
                            let p = c - prev;
                            prev = c;
                            (self.states[t].name.clone(), p)
                        })
                        .collect();
                    StateDocument {
                        name: s.name.clone(),
                        terminal: s.terminal,
                        emission: s.emission.as_ref().map(|(kind, dist)| EmissionDocument {
                            kind: *kind,
                            dist: dist.clone(),
                        }),
                        transitions,
                    }
                })
                .collect(),
        }
    }

    pub fn state_names(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(|s| s.name.as_str())
    }

    /// Walks from the start state until a terminal state or `budget` state visits.
    pub fn walk<R: Rng + ?Sized>(&self, rng: &mut R, budget: usize) -> Walk {
        let mut walk = Walk::default();
        let mut current = 0;
        for _ in 0..budget {
            let state = &self.states[current];
            if let Some((kind, dist)) = &state.emission {
                walk.events.push(WalkEvent {
                    kind: *kind,
                    delay_us: dist.sample(rng),
                });
            }
            if state.terminal {
                return walk;
            }
            let u: f64 = rng.random();
            current = state
                .transitions
                .iter()
                .find(|&&(_, c)| u < c)
                .or(state.transitions.last())
                .map(|&(t, _)| t)
                .expect("non-terminal state has transitions");
        }
        walk.truncated = true;
        walk
    }
}

pub fn load_model(path: &Path) -> Result<MarkovModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: ModelDocument =
        serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))?;
    MarkovModel::from_document(&doc)
}

fn state(
    name: &str,
    emission: Option<(EventKind, Family, Vec<f64>)>,
    transitions: &[(&str, f64)],
) -> StateDocument {
    StateDocument {
        name: name.into(),
        terminal: transitions.is_empty(),
        emission: emission.map(|(kind, family, params)| EmissionDocument {
            kind,
            dist: DistributionSpec { family, params },
        }),
        transitions: transitions.iter().map(|&(t, p)| (t.to_string(), p)).collect(),
    }
}

/// Synthetic stand-in stream and packet models.
///
/// Stream model: streams arrive with exponential inter-arrival times (mean
/// 2 s) and the circuit continues with probability 0.8 after each stream, so
/// a circuit carries 5 streams on average.
///
/// Packet model: a request burst of packets to the server (log-normal
/// spacing, median 10 ms, geometric length with mean 2) followed by a
/// response burst to the client (log-normal spacing, median 2 ms, geometric
/// length with mean 50). After a response burst the stream issues another
/// request or ends with equal probability.
pub fn default_models() -> (MarkovModel, MarkovModel) {
    let stream = ModelDocument {
        states: vec![
            state("start", None, &[("stream", 1.0)]),
            state(
                "stream",
                Some((EventKind::StreamCreate, Family::Exponential, vec![1.0 / 2.0e6])),
                &[("stream", 0.8), ("end", 0.2)],
            ),
            state("end", None, &[]),
        ],
    };
    let packet = ModelDocument {
        states: vec![
            state("start", None, &[("request", 1.0)]),
            state(
                "request",
                Some((EventKind::PacketToServer, Family::LogNormal, vec![10_000f64.ln(), 1.0])),
                &[("request", 0.5), ("response", 0.5)],
            ),
            state(
                "response",
                Some((EventKind::PacketToClient, Family::LogNormal, vec![2_000f64.ln(), 1.0])),
                &[("response", 0.98), ("request", 0.01), ("end", 0.01)],
            ),
            state("end", None, &[]),
        ],
    };
    (
        MarkovModel::from_document(&stream).expect("default stream model is valid"),
        MarkovModel::from_document(&packet).expect("default packet model is valid"),
    )
}
