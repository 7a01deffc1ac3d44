//! Staging: reduce a history of relay snapshots, descriptors and per-country
//! user counts to a compact per-relay and per-position summary.

mod compute;
mod input;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util;

pub use compute::{compute_network_stats, compute_relay_stats, compute_user_probs, stage, RelayStats};
pub use input::{load_descriptors, load_snapshots, load_user_counts};

pub const STAGED_VERSION: &str = "tornet-staged/1";

/// Relay position derived from the guard and exit flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Position {
    /// Exit and guard.
    D,
    /// Exit only.
    E,
    /// Guard only.
    G,
    /// Middle (neither flag).
    M,
}

impl Position {
    pub const ALL: [Position; 4] = [Position::D, Position::E, Position::G, Position::M];
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Position::D => "D",
            Position::E => "E",
            Position::G => "G",
            Position::M => "M",
        };
        f.write_str(s)
    }
}

pub fn classify_position(is_guard: bool, is_exit: bool) -> Position {
    match (is_guard, is_exit) {
        (true, true) => Position::D,
        (false, true) => Position::E,
        (true, false) => Position::G,
        (false, false) => Position::M,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRelay {
    #[serde(rename = "fp")]
    pub fingerprint: String,
    pub ip: String,
    #[serde(rename = "cc")]
    pub country: String,
    pub guard: bool,
    pub exit: bool,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsensusSnapshot {
    pub timestamp: i64,
    pub relays: Vec<SnapshotRelay>,
}

impl ConsensusSnapshot {
    /// Weight of each relay divided by the snapshot total. A snapshot whose
    /// weights are all zero normalizes to zeros.
    pub fn normalized_weights(&self) -> Vec<f64> {
        let total: f64 = self.relays.iter().map(|r| r.weight).sum();
        self.relays
            .iter()
            .map(|r| if total > 0.0 { r.weight / total } else { 0.0 })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptorRecord {
    #[serde(rename = "fp")]
    pub fingerprint: String,
    #[serde(rename = "obs_bw")]
    pub observed_bandwidth: f64,
    #[serde(rename = "rate")]
    pub bandwidth_rate: f64,
    #[serde(rename = "burst")]
    pub bandwidth_burst: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserCountRecord {
    pub date: String,
    #[serde(rename = "cc")]
    pub country: String,
    pub count: u64,
}

/// Per-relay summary statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StagedRelay {
    pub fingerprint: String,
    pub ip: String,
    pub country: String,
    /// Fraction of snapshots in which the relay was running.
    pub r: f64,
    /// Fraction of the relay's snapshots in which it had the guard flag.
    pub g: f64,
    /// Fraction of the relay's snapshots in which it had the exit flag.
    pub e: f64,
    /// Median normalized consensus weight.
    pub w: f64,
    /// Max observed bandwidth, bytes/s.
    pub b: f64,
    /// Median token-bucket rate, bytes/s.
    pub lambda: f64,
    /// Median token-bucket burst, bytes.
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StagedModel {
    pub relays: Vec<StagedRelay>,
    /// Median relay count per position.
    #[serde(rename = "C")]
    pub position_counts: BTreeMap<Position, u64>,
    /// Median total normalized weight per position. Stored, not consumed by generation.
    #[serde(rename = "W")]
    pub position_weights: BTreeMap<Position, f64>,
    /// Probability that a user is in each country.
    #[serde(rename = "U")]
    pub user_probs: BTreeMap<String, f64>,
    pub consensus_count: u64,
}

impl StagedModel {
    pub fn validate(&self) -> Result<()> {
        for relay in &self.relays {
            for (name, v) in [("r", relay.r), ("g", relay.g), ("e", relay.e)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Schema(format!(
                        "relay {}: {name}={v} outside [0,1]",
                        relay.fingerprint
                    )));
                }
            }
            if relay.w < 0.0 || !relay.w.is_finite() {
                return Err(Error::Schema(format!("relay {}: negative weight", relay.fingerprint)));
            }
        }
        for map_name in ["C", "W"] {
            let keys: Vec<Position> = if map_name == "C" {
                self.position_counts.keys().copied().collect()
            } else {
                self.position_weights.keys().copied().collect()
            };
            if keys != Position::ALL {
                return Err(Error::Schema(format!("{map_name} must have exactly positions D,E,G,M")));
            }
        }
        let total: f64 = self.user_probs.values().sum();
        if (total - 1.0).abs() > 1e-9 || self.user_probs.values().any(|&p| p < 0.0) {
            return Err(Error::Schema(format!("U sums to {total}, expected 1")));
        }
        Ok(())
    }

    /// Σ_ρ C_ρ, the relay count of a full-scale network.
    pub fn full_network_size(&self) -> u64 {
        self.position_counts.values().sum()
    }
}

/// Serializes `value` as a JSON object with an added `version` field.
pub(crate) fn versioned_value<T: Serialize>(value: &T, version: &str) -> Result<serde_json::Value> {
    let body = serde_json::to_value(value).map_err(|e| Error::Schema(e.to_string()))?;
    let serde_json::Value::Object(fields) = body else {
        return Err(Error::Schema("expected a JSON object".into()));
    };
    let mut doc = serde_json::Map::new();
    doc.insert("version".into(), version.into());
    doc.extend(fields);
    Ok(serde_json::Value::Object(doc))
}

/// Checks the `version` field of a parsed document and strips it.
pub(crate) fn check_version(
    mut value: serde_json::Value,
    expected: &str,
) -> Result<serde_json::Value> {
    let found = value
        .get("version")
        .and_then(|v| v.as_str())
        .unwrap_or("<missing>")
        .to_string();
    if found != expected {
        return Err(Error::Version {
            expected: expected.to_string(),
            found,
        });
    }
    if let Some(obj) = value.as_object_mut() {
        obj.remove("version");
    }
    Ok(value)
}

pub fn write_staged(model: &StagedModel, path: &Path) -> Result<()> {
    util::write_json(&versioned_value(model, STAGED_VERSION)?, path)
}

pub fn read_staged(path: &Path) -> Result<StagedModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_staged(&text, &path.display().to_string())
}

pub fn parse_staged(text: &str, context: &str) -> Result<StagedModel> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::parse(context, e))?;
    let value = check_version(value, STAGED_VERSION)?;
    let model: StagedModel = serde_json::from_value(value).map_err(|e| Error::parse(context, e))?;
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_follow_flags() {
        assert_eq!(classify_position(true, true), Position::D);
        assert_eq!(classify_position(false, false), Position::M);
        assert_eq!(classify_position(true, false), Position::G);
        assert_eq!(classify_position(false, true), Position::E);
    }

    fn model() -> StagedModel {
        StagedModel {
            relays: vec![StagedRelay {
                fingerprint: "AA".into(),
                ip: "10.0.0.1".into(),
                country: "us".into(),
                r: 0.75,
                g: 0.5,
                e: 0.0,
                w: 0.123456789012345,
                b: 1.5e6,
                lambda: 1e6,
                beta: 2e6,
            }],
            position_counts: Position::ALL.iter().map(|&p| (p, 1)).collect(),
            position_weights: Position::ALL.iter().map(|&p| (p, 0.25)).collect(),
            user_probs: [("us".to_string(), 0.3), ("de".to_string(), 0.7)].into(),
            consensus_count: 4,
        }
    }

    #[test]
    fn staged_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("staged.json");
        let m = model();
        write_staged(&m, &path).unwrap();
        assert_eq!(read_staged(&path).unwrap(), m);
    }

    #[test]
    fn unknown_version_is_rejected() {
        let text = versioned_value(&model(), "tornet-staged/0").unwrap().to_string();
        match parse_staged(&text, "mem") {
            Err(Error::Version { expected, found }) => {
                assert_eq!(expected, STAGED_VERSION);
                assert_eq!(found, "tornet-staged/0");
            }
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_document_is_a_parse_error() {
        let text = versioned_value(&model(), STAGED_VERSION).unwrap().to_string();
        let cut = &text[..text.len() / 2];
        assert!(matches!(parse_staged(cut, "mem"), Err(Error::Parse { .. })));
    }
}
