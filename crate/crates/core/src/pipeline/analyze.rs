use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use log::{info, warn};

use super::commands::read_run_manifests;
use super::plan::ExperimentPlan;
use crate::error::{Error, Result};
use crate::sim::{read_goodput_csv, read_metrics_csv, relay_goodput_series, DownloadKind, DownloadRecord, Outcome};
use crate::stats::{
    group_runs, network_estimate, true_estimate, write_estimate_csv, EmpiricalDistribution, QuantileGrid,
    TrueEstimate,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    /// Time to first byte of benchmark downloads of every size.
    Ttfb,
    /// Time to last byte of benchmark downloads of one size.
    Ttlb(DownloadKind),
    /// Per benchmark client, failed over attempted downloads.
    ErrorRate,
    /// Relay goodput per second, Gbit/s.
    Goodput,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Ttfb,
        Metric::Ttlb(DownloadKind::Perf50k),
        Metric::Ttlb(DownloadKind::Perf1m),
        Metric::Ttlb(DownloadKind::Perf5m),
        Metric::ErrorRate,
        Metric::Goodput,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ttfb => "ttfb",
            Metric::Ttlb(DownloadKind::Perf50k) => "ttlb_50k",
            Metric::Ttlb(DownloadKind::Perf1m) => "ttlb_1m",
            Metric::Ttlb(DownloadKind::Perf5m) => "ttlb_5m",
            Metric::Ttlb(DownloadKind::Markov) => "ttlb_markov",
            Metric::ErrorRate => "error_rate",
            Metric::Goodput => "goodput",
        }
    }

    pub fn parse(name: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.name() == name)
    }

    /// Whether the metric is a time reported at the simulator's resolution.
    pub fn is_time(self) -> bool {
        matches!(self, Metric::Ttfb | Metric::Ttlb(_))
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Samples of `metric` from one run, ignoring everything before `warmup_s`.
pub fn metric_samples(metric: Metric, downloads: &[DownloadRecord], goodput_bits: &[f64], warmup_s: f64) -> Vec<f64> {
    let post = downloads.iter().filter(|d| d.start_s >= warmup_s);
    match metric {
        Metric::Ttfb => post
            .filter(|d| d.kind.is_perf() && d.outcome == Outcome::Ok)
            .filter_map(|d| d.ttfb_s)
            .collect(),
        Metric::Ttlb(kind) => post
            .filter(|d| d.kind == kind && d.outcome == Outcome::Ok)
            .filter_map(|d| d.ttlb_s)
            .collect(),
        Metric::ErrorRate => {
            let mut per_client: BTreeMap<&str, (u32, u32)> = BTreeMap::new();
            for d in post.filter(|d| d.kind.is_perf()) {
                let e = per_client.entry(&d.client).or_default();
                e.1 += 1;
                if d.outcome != Outcome::Ok {
                    e.0 += 1;
                }
            }
            per_client.values().map(|&(f, n)| f as f64 / n as f64).collect()
        }
        Metric::Goodput => {
            let skip = warmup_s.ceil() as usize;
            relay_goodput_series(goodput_bits.get(skip..).unwrap_or(&[]), None)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisOptions {
    pub metrics: Vec<Metric>,
    pub confidence: f64,
    /// Reporting resolution of time metrics, seconds.
    pub resolution: f64,
    pub grid: QuantileGrid,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            metrics: Metric::ALL.to_vec(),
            confidence: crate::stats::DEFAULT_CONFIDENCE,
            resolution: crate::sim::TIME_RESOLUTION_S,
            grid: QuantileGrid::default(),
        }
    }
}

/// Estimates every selected metric across the plan's networks and writes
/// `analysis/<metric>.csv`. Metrics that some run has no samples for are
/// skipped with a warning.
pub fn cmd_analyze(plan: &ExperimentPlan, opts: &AnalysisOptions) -> Result<Vec<(Metric, TrueEstimate, PathBuf)>> {
    plan.validate()?;
    let manifests = read_run_manifests(plan)?;
    let groups = group_runs(&manifests, plan.networks)?;

    let mut runs = Vec::new();
    let mut post_warmup = 0;
    for group in &groups {
        let mut net = Vec::new();
        for m in group {
            let dir = plan.run_dir(m.network, m.sim);
            let downloads = read_metrics_csv(&dir.join(&m.metrics))?;
            let goodput = read_goodput_csv(&dir.join(&m.goodput))?;
            post_warmup += downloads.iter().filter(|d| d.start_s >= plan.warmup_s).count();
            net.push((downloads, goodput));
        }
        runs.push(net);
    }
    if post_warmup == 0 {
        return Err(Error::Empty("no post-warmup samples".into()));
    }

    let mut out = Vec::new();
    'metric: for &metric in &opts.metrics {
        let resolution = if metric.is_time() { opts.resolution } else { 0.0 };
        let mut estimates = Vec::with_capacity(runs.len());
        for (i, net) in runs.iter().enumerate() {
            let mut dists = Vec::with_capacity(net.len());
            for (j, (downloads, goodput)) in net.iter().enumerate() {
                let samples = metric_samples(metric, downloads, goodput, plan.warmup_s);
                if samples.is_empty() {
                    warn!("skipping {metric}: network {i} run {j} has no post-warmup samples");
                    continue 'metric;
                }
                dists.push(EmpiricalDistribution::new(samples, resolution)?);
            }
            estimates.push(network_estimate(&dists, &opts.grid, opts.confidence, resolution)?);
        }
        let estimate = true_estimate(&estimates, opts.confidence)?;
        let path = plan.analysis_dir().join(format!("{metric}.csv"));
        write_estimate_csv(&estimate, &path)?;
        info!("{metric}: {}", path.display());
        out.push((metric, estimate, path));
    }
    Ok(out)
}
