//! Per-network and cross-network quantile estimators with confidence
//! intervals.
//!
//! For network i with m_i simulations the estimate at quantile q is the mean
//! of the per-simulation inverse CDFs, with error
//! ε̂_i = σ̂_i·t(α, m_i−1)/√(m_i−1) where σ̂_i² is the population variance of
//! those values plus the resolution error ζ_i². Across n networks,
//! μ = mean(μ̂_i), σ = population std of μ̂_i, δ = mean(ε̂_i) and
//! ε = δ + σ·t(α, n−1)/√(n−1); the interval is [μ − ε, μ + ε].

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::quantile::{EmpiricalDistribution, QuantileGrid};
use super::tdist::t_value;
use crate::error::{Error, Result};
use crate::util::{mean, population_std};

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// ζ = r/√(12·m).
pub fn resolution_error(resolution: f64, sims: usize) -> f64 {
    resolution / (12.0 * sims as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkEstimate {
    pub quantiles: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub sims: usize,
    pub zeta: f64,
}

pub fn network_estimate(
    sims: &[EmpiricalDistribution],
    grid: &QuantileGrid,
    confidence: f64,
    resolution: f64,
) -> Result<NetworkEstimate> {
    let m = sims.len();
    if m == 0 {
        return Err(Error::Empty("network has no simulations".into()));
    }
    let zeta = resolution_error(resolution, m);
    let t = if m > 1 {
        Some(t_value(confidence, (m - 1) as f64)?)
    } else {
        None
    };
    let mut est = NetworkEstimate {
        quantiles: grid.values().to_vec(),
        mu: Vec::with_capacity(grid.values().len()),
        sigma: Vec::with_capacity(grid.values().len()),
        epsilon: Vec::with_capacity(grid.values().len()),
        sims: m,
        zeta,
    };
    let mut values = vec![0.0; m];
    for &q in grid.values() {
        for (v, d) in values.iter_mut().zip(sims) {
            *v = d.inverse_cdf(q)?;
        }
        let sd = population_std(&values);
        let sigma = (sd * sd + zeta * zeta).sqrt();
        est.mu.push(mean(&values));
        est.sigma.push(sigma);
        est.epsilon.push(match t {
            Some(t) => sigma * t / ((m - 1) as f64).sqrt(),
            None => zeta,
        });
    }
    Ok(est)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub q: f64,
    pub mu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n: usize,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrueEstimate {
    pub rows: Vec<EstimateRow>,
    pub networks: usize,
    pub confidence: f64,
}

/// Combines one quantile across networks given precomputed t(α, n−1).
pub(crate) fn combine(values: &[f64], errors: &[f64], t: f64) -> (f64, f64, f64, f64) {
    let n = values.len();
    let mu = mean(values);
    let sigma = population_std(values);
    let delta = mean(errors);
    let epsilon = delta + sigma * t / ((n - 1) as f64).sqrt();
    (mu, sigma, delta, epsilon)
}

/// Cross-network estimate with confidence intervals. Needs at least two networks.
pub fn true_estimate(nets: &[NetworkEstimate], confidence: f64) -> Result<TrueEstimate> {
    let n = nets.len();
    if n < 2 {
        return Err(Error::InvalidParam(format!(
            "confidence intervals need at least 2 sampled networks, got {n}"
        )));
    }
    let grid = &nets[0].quantiles;
    if nets.iter().any(|e| &e.quantiles != grid) {
        return Err(Error::InvalidParam("network estimates use different quantile grids".into()));
    }
    let t = t_value(confidence, (n - 1) as f64)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut values = vec![0.0; n];
    let mut errors = vec![0.0; n];
    for (k, &q) in grid.iter().enumerate() {
        for (i, e) in nets.iter().enumerate() {
            values[i] = e.mu[k];
            errors[i] = e.epsilon[k];
        }
        let (mu, sigma, delta, epsilon) = combine(&values, &errors, t);
        rows.push(EstimateRow {
            q,
            mu,
            sigma,
            delta,
            epsilon,
            ci_lo: mu - epsilon,
            ci_hi: mu + epsilon,
            n,
            alpha: confidence,
        });
    }
    Ok(TrueEstimate {
        rows,
        networks: n,
        confidence,
    })
}

/// μ(q) alone, for any n ≥ 1.
pub fn point_estimate(nets: &[NetworkEstimate]) -> Result<Vec<f64>> {
    let Some(first) = nets.first() else {
        return Err(Error::Empty("no network estimates".into()));
    };
    Ok((0..first.quantiles.len())
        .map(|k| nets.iter().map(|e| e.mu[k]).sum::<f64>() / nets.len() as f64)
        .collect())
}

pub fn write_estimate_csv(est: &TrueEstimate, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    for row in &est.rows {
        w.serialize(row)
            .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_estimate_csv(path: &Path) -> Result<Vec<EstimateRow>> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    r.deserialize()
        .map(|row| row.map_err(|e| Error::parse(path.display().to_string(), e)))
        .collect()
}
