//! Independent oracles and fixture helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use tornet::pipeline::{cmd_stage, ExperimentPlan};
use tornet::stats::t_value;

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

/// Stages the bundled corpus into `dir/staged.json`.
pub fn stage_fixture(dir: &Path) -> PathBuf {
    let out = dir.join("staged.json");
    cmd_stage(
        &fixture("corpus/snapshots.jsonl"),
        &fixture("corpus/descriptors.jsonl"),
        &fixture("corpus/users.jsonl"),
        &out,
    )
    .expect("fixture corpus stages");
    out
}

/// A small plan on the bundled fixture: about 36 relays, 28 benchmark
/// clients and 139 Markov clients per network.
pub fn small_plan(staged: &Path, out: &Path) -> ExperimentPlan {
    let mut plan = ExperimentPlan::new(staged, fixture("map.graphml"), out);
    plan.scale = 0.035;
    plan.load = 0.1;
    plan.pscale = 0.005;
    plan.duration_s = 300.0;
    plan.warmup_s = 60.0;
    plan.seed = 7;
    plan
}

// ---------------------------------------------------------------------------
// Max-min fairness in exact arithmetic.

pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Progressive filling over exact rationals: raise every unfrozen flow by
/// the smallest fair increment, freeze flows on saturated elements, repeat.
pub fn exact_max_min(caps: &[BigRational], flows: &[Vec<usize>]) -> Vec<Option<BigRational>> {
    let n = flows.len();
    let mut rate = vec![BigRational::zero(); n];
    let mut frozen: Vec<bool> = flows.iter().map(|f| f.is_empty()).collect();
    loop {
        let mut best: Option<BigRational> = None;
        for (e, cap) in caps.iter().enumerate() {
            let users: Vec<usize> = (0..n).filter(|&f| flows[f].contains(&e)).collect();
            let live = users.iter().filter(|&&f| !frozen[f]).count();
            if live == 0 {
                continue;
            }
            let used: BigRational = users.iter().map(|&f| rate[f].clone()).sum();
            let inc = (cap - used) / BigRational::from_integer(BigInt::from(live));
            if best.as_ref().is_none_or(|b| inc < *b) {
                best = Some(inc);
            }
        }
        let Some(inc) = best else { break };
        for f in 0..n {
            if !frozen[f] {
                rate[f] += inc.clone();
            }
        }
        for (e, cap) in caps.iter().enumerate() {
            let users: Vec<usize> = (0..n).filter(|&f| flows[f].contains(&e)).collect();
            let used: BigRational = users.iter().map(|&f| rate[f].clone()).sum();
            if &used == cap {
                for f in users {
                    frozen[f] = true;
                }
            }
        }
    }
    (0..n)
        .map(|f| if flows[f].is_empty() { None } else { Some(rate[f].clone()) })
        .collect()
}

/// A random instance: integer or fractional capacities, each flow crossing
/// a random nonempty subset of elements.
pub fn random_instance<R: Rng>(rng: &mut R) -> (Vec<f64>, Vec<Vec<usize>>) {
    let m = rng.random_range(1..=6);
    let n = rng.random_range(1..=6);
    let caps = (0..m)
        .map(|_| {
            if rng.random_bool(0.5) {
                rng.random_range(1..=20) as f64
            } else {
                rng.random_range(1..=4000) as f64 / 64.0
            }
        })
        .collect();
    let flows = (0..n)
        .map(|_| {
            let mut elems: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.4)).collect();
            if elems.is_empty() {
                elems.push(rng.random_range(0..m));
            }
            elems
        })
        .collect();
    (caps, flows)
}

/// Largest absolute difference between the float and exact allocations.
pub fn max_min_error(caps: &[f64], flows: &[Vec<usize>], rates: &[f64]) -> f64 {
    let exact = exact_max_min(&caps.iter().map(|&c| rational(c)).collect::<Vec<_>>(), flows);
    rates
        .iter()
        .zip(&exact)
        .map(|(r, x)| match x {
            Some(x) => (r - x.to_f64().unwrap()).abs(),
            None if r.is_infinite() => 0.0,
            None => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Straight-line estimators.

pub fn naive_quantile(samples: &[f64], q: f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

pub struct NaiveNetwork {
    pub mu: f64,
    pub epsilon: f64,
}

/// Mean and error of one network at quantile q from its simulations.
pub fn naive_network(sims: &[Vec<f64>], q: f64, confidence: f64, r: f64) -> NaiveNetwork {
    let m = sims.len();
    let values: Vec<f64> = sims.iter().map(|s| naive_quantile(s, q)).collect();
    let mut mu = 0.0;
    for v in &values {
        mu += v;
    }
    mu /= m as f64;
    let mut var = 0.0;
    for v in &values {
        var += (v - mu) * (v - mu);
    }
    var /= m as f64;
    let zeta = r / (12.0 * m as f64).sqrt();
    let sigma = (var + zeta * zeta).sqrt();
    let epsilon = if m == 1 {
        zeta
    } else {
        sigma * t_value(confidence, (m - 1) as f64).unwrap() / ((m - 1) as f64).sqrt()
    };
    NaiveNetwork { mu, epsilon }
}

/// (mu, sigma, delta, epsilon) across networks.
pub fn naive_true(nets: &[NaiveNetwork], confidence: f64) -> (f64, f64, f64, f64) {
    let n = nets.len() as f64;
    let mut mu = 0.0;
    let mut delta = 0.0;
    for net in nets {
        mu += net.mu;
        delta += net.epsilon;
    }
    mu /= n;
    delta /= n;
    let mut var = 0.0;
    for net in nets {
        var += (net.mu - mu) * (net.mu - mu);
    }
    let sigma = (var / n).sqrt();
    let epsilon = delta + sigma * t_value(confidence, n - 1.0).unwrap() / (n - 1.0).sqrt();
    (mu, sigma, delta, epsilon)
}
