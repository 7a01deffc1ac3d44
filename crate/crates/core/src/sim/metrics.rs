//! Per-run measurements and their CSV form.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Granularity of reported times, seconds.
pub const TIME_RESOLUTION_S: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DownloadKind {
    Perf50k,
    Perf1m,
    Perf5m,
    Markov,
}

impl DownloadKind {
    pub const PERF: [DownloadKind; 3] = [DownloadKind::Perf50k, DownloadKind::Perf1m, DownloadKind::Perf5m];

    pub fn for_size(bytes: u64) -> Option<Self> {
        match bytes {
            51_200 => Some(DownloadKind::Perf50k),
            1_048_576 => Some(DownloadKind::Perf1m),
            5_242_880 => Some(DownloadKind::Perf5m),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DownloadKind::Perf50k => "perf50k",
            DownloadKind::Perf1m => "perf1m",
            DownloadKind::Perf5m => "perf5m",
            DownloadKind::Markov => "markov",
        }
    }

    pub fn is_perf(self) -> bool {
        self != DownloadKind::Markov
    }
}

impl fmt::Display for DownloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Ok,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DownloadRecord {
    pub kind: DownloadKind,
    pub client: String,
    pub start_s: f64,
    pub ttfb_s: Option<f64>,
    pub ttlb_s: Option<f64>,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricsRecord {
    pub downloads: Vec<DownloadRecord>,
    /// Application bits forwarded by all relays in each simulated second.
    pub goodput_bits: Vec<f64>,
    /// Failures that produced no download record, by kind.
    pub errors: BTreeMap<String, u64>,
}

/// Rounds a duration up to the reporting resolution.
pub fn quantize_up(seconds: f64) -> f64 {
    let steps = (seconds / TIME_RESOLUTION_S - 1e-6).ceil().max(0.0);
    steps / 100.0
}

/// Rounds a time down to the reporting resolution.
pub fn quantize_down(seconds: f64) -> f64 {
    (seconds / TIME_RESOLUTION_S + 1e-6).floor() / 100.0
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_default()
}

pub fn write_metrics_csv(record: &MetricsRecord, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["kind", "client", "start_s", "ttfb_s", "ttlb_s", "outcome"])
        .map_err(|e| csv_error(path, e))?;
    for d in &record.downloads {
        let outcome = match d.outcome {
            Outcome::Ok => "ok",
            Outcome::Timeout => "timeout",
        };
        w.write_record([
            d.kind.as_str(),
            &d.client,
            &format!("{:.2}", d.start_s),
            &opt(d.ttfb_s),
            &opt(d.ttlb_s),
            outcome,
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<DownloadRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| Error::parse(path.display().to_string(), e)))
        .collect()
}

pub fn write_goodput_csv(record: &MetricsRecord, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["second", "goodput_bits"]).map_err(|e| csv_error(path, e))?;
    for (s, bits) in record.goodput_bits.iter().enumerate() {
        w.write_record([s.to_string(), format!("{bits:.0}")])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_goodput_csv(path: &Path) -> Result<Vec<f64>> {
    #[derive(Deserialize)]
    struct Row {
        second: usize,
        goodput_bits: f64,
    }
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for row in r.deserialize::<Row>() {
        let row = row.map_err(|e| Error::parse(path.display().to_string(), e))?;
        if row.second != out.len() {
            return Err(Error::parse(path.display().to_string(), "seconds must be consecutive from 0"));
        }
        out.push(row.goodput_bits);
    }
    Ok(out)
}

/// Relay goodput per second in Gbit/s. With `scale`, the series is divided
/// by the network scale to extrapolate to a full-size network.
pub fn relay_goodput_series(goodput_bits: &[f64], scale: Option<f64>) -> Vec<f64> {
    let factor = scale.map_or(1.0, |s| 1.0 / s);
    goodput_bits.iter().map(|b| b / 1e9 * factor).collect()
}
