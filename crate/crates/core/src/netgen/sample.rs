//! Relay sampling: weighted selection of a full-size relay set, flag
//! assignment, and per-position bucketed-median subsampling.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::staging::{classify_position, Position, StagedModel, StagedRelay};

#[derive(Clone, Debug, PartialEq)]
pub struct SampledRelay {
    pub relay: StagedRelay,
    pub guard: bool,
    pub exit: bool,
}

impl SampledRelay {
    pub fn position(&self) -> Position {
        classify_position(self.guard, self.exit)
    }
}

/// Draws `n` distinct indices with probability proportional to `weights`,
/// using successive draws from the remaining weight.
///
/// Implemented as an exponential race: each item gets the key `E_i / w_i`
/// with `E_i ~ Exp(1)` and the `n` smallest keys win, in key order. Zero
/// weights are never drawn.
pub fn weighted_sample_without_replacement<R: Rng + ?Sized>(
    weights: &[f64],
    n: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(weights.len());
    for (i, &w) in weights.iter().enumerate() {
        // Draw for every item so the stream does not depend on which weights are zero.
        let u: f64 = 1.0 - rng.random::<f64>();
        if w > 0.0 {
            keyed.push((-u.ln() / w, i));
        }
    }
    if keyed.len() < n {
        return Err(Error::InsufficientRelays {
            needed: n,
            available: keyed.len(),
        });
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(keyed.into_iter().take(n).map(|(_, i)| i).collect())
}

/// Samples Σ_ρ C_ρ relays weighted by running frequency, then assigns each
/// the guard flag with probability g and the exit flag with probability e.
pub fn sample_full_network<R: Rng + ?Sized>(
    staged: &StagedModel,
    rng: &mut R,
) -> Result<Vec<SampledRelay>> {
    let n = staged.full_network_size() as usize;
    let weights: Vec<f64> = staged.relays.iter().map(|r| r.r).collect();
    let picked = weighted_sample_without_replacement(&weights, n, rng)?;
    Ok(picked
        .into_iter()
        .map(|i| {
            let relay = staged.relays[i].clone();
            let guard = rng.random_bool(relay.g.clamp(0.0, 1.0));
            let exit = rng.random_bool(relay.e.clamp(0.0, 1.0));
            SampledRelay { relay, guard, exit }
        })
        .collect())
}

/// Sizes of `m` contiguous buckets over `len` items, larger buckets first.
pub fn bucket_sizes(len: usize, m: usize) -> Vec<usize> {
    let base = len / m;
    let extra = len % m;
    (0..m).map(|i| base + usize::from(i < extra)).collect()
}

fn by_weight(a: &SampledRelay, b: &SampledRelay) -> Ordering {
    a.relay
        .w
        .total_cmp(&b.relay.w)
        .then_with(|| a.relay.fingerprint.cmp(&b.relay.fingerprint))
}

/// Sorts by weight (ties by fingerprint), splits into `m` near-equal
/// buckets and keeps the lower-median relay of each bucket.
pub fn subsample_position(relays: &[SampledRelay], m: usize) -> Result<Vec<SampledRelay>> {
    if m == 0 || m > relays.len() {
        return Err(Error::InvalidParam(format!(
            "cannot subsample {m} relays from a population of {}",
            relays.len()
        )));
    }
    let mut sorted: Vec<&SampledRelay> = relays.iter().collect();
    sorted.sort_by(|a, b| by_weight(a, b));
    let mut out = Vec::with_capacity(m);
    let mut start = 0;
    for size in bucket_sizes(sorted.len(), m) {
        out.push(sorted[start + (size - 1) / 2].clone());
        start += size;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::seeded_rng;
    use std::collections::BTreeMap;

    pub(crate) fn staged_relay(fp: &str, r: f64, g: f64, e: f64, w: f64) -> StagedRelay {
        StagedRelay {
            fingerprint: fp.into(),
            ip: "10.0.0.1".into(),
            country: "us".into(),
            r,
            g,
            e,
            w,
            b: 1e6,
            lambda: 1e6,
            beta: 2e6,
        }
    }

    fn sampled(fp: &str, w: f64) -> SampledRelay {
        SampledRelay {
            relay: staged_relay(fp, 1.0, 0.0, 0.0, w),
            guard: false,
            exit: false,
        }
    }

    fn model(relays: Vec<StagedRelay>, middles: u64) -> StagedModel {
        StagedModel {
            relays,
            position_counts: [
                (Position::D, 0),
                (Position::E, 0),
                (Position::G, 0),
                (Position::M, middles),
            ]
            .into(),
            position_weights: Position::ALL.iter().map(|&p| (p, 0.0)).collect(),
            user_probs: [("us".to_string(), 1.0)].into(),
            consensus_count: 1,
        }
    }

    #[test]
    fn bucketed_median_selection() {
        let pop: Vec<_> = (1..=6).map(|i| sampled(&format!("r{i}"), i as f64)).collect();
        let picked = subsample_position(&pop, 2).unwrap();
        let w: Vec<f64> = picked.iter().map(|r| r.relay.w).collect();
        assert_eq!(w, [2.0, 5.0]);
    }

    #[test]
    fn full_population_is_identity_and_one_is_median() {
        let pop: Vec<_> = (1..=5).rev().map(|i| sampled(&format!("r{i}"), i as f64)).collect();
        let all = subsample_position(&pop, 5).unwrap();
        assert_eq!(all.iter().map(|r| r.relay.w).collect::<Vec<_>>(), [1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(subsample_position(&pop, 1).unwrap()[0].relay.w, 3.0);
        let four: Vec<_> = (1..=4).map(|i| sampled(&format!("r{i}"), i as f64)).collect();
        assert_eq!(subsample_position(&four, 1).unwrap()[0].relay.w, 2.0);
        assert!(subsample_position(&four, 5).is_err());
    }

    #[test]
    fn weight_ties_break_by_fingerprint() {
        let pop = vec![sampled("b", 1.0), sampled("a", 1.0), sampled("c", 1.0)];
        let picked = subsample_position(&pop, 3).unwrap();
        let fps: Vec<&str> = picked.iter().map(|r| r.relay.fingerprint.as_str()).collect();
        assert_eq!(fps, ["a", "b", "c"]);
    }

    #[test]
    fn bucket_sizes_differ_by_at_most_one() {
        assert_eq!(bucket_sizes(7, 3), [3, 2, 2]);
        assert_eq!(bucket_sizes(6, 3), [2, 2, 2]);
    }

    #[test]
    fn zero_running_fraction_is_never_sampled() {
        let relays = vec![
            staged_relay("a", 1.0, 0.0, 0.0, 1.0),
            staged_relay("b", 0.0, 0.0, 0.0, 1.0),
            staged_relay("c", 0.5, 0.0, 0.0, 1.0),
        ];
        let m = model(relays, 2);
        for seed in 0..200 {
            let s = sample_full_network(&m, &mut seeded_rng(seed, &[])).unwrap();
            assert!(s.iter().all(|r| r.relay.fingerprint != "b"));
        }
    }

    #[test]
    fn insufficient_pool_reports_counts() {
        let m = model(vec![staged_relay("a", 1.0, 0.0, 0.0, 1.0), staged_relay("b", 0.0, 0.0, 0.0, 1.0)], 2);
        match sample_full_network(&m, &mut seeded_rng(0, &[])) {
            Err(Error::InsufficientRelays { needed, available }) => assert_eq!((needed, available), (2, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn certain_flags_are_always_assigned() {
        let relays = vec![staged_relay("a", 1.0, 1.0, 0.0, 1.0), staged_relay("b", 1.0, 1.0, 1.0, 1.0)];
        let m = model(relays, 2);
        for seed in 0..50 {
            let s = sample_full_network(&m, &mut seeded_rng(seed, &[])).unwrap();
            assert!(s.iter().all(|r| r.guard));
            assert_eq!(s.iter().filter(|r| r.exit).count(), 1);
        }
    }

    #[test]
    fn equal_weights_sample_uniformly() {
        // 10 relays, pick 3: each inclusion is Bernoulli(0.3) per trial.
        let relays: Vec<_> = (0..10).map(|i| staged_relay(&format!("r{i}"), 0.7, 0.0, 0.0, 1.0)).collect();
        let m = model(relays, 3);
        let trials = 10_000;
        let mut hits: BTreeMap<String, usize> = BTreeMap::new();
        let mut rng = seeded_rng(77, &[]);
        for _ in 0..trials {
            for r in sample_full_network(&m, &mut rng).unwrap() {
                *hits.entry(r.relay.fingerprint).or_default() += 1;
            }
        }
        let expect = trials as f64 * 0.3;
        let sigma = (trials as f64 * 0.3 * 0.7).sqrt();
        for (fp, h) in hits {
            assert!((h as f64 - expect).abs() < 3.0 * sigma, "{fp}: {h}");
        }
    }
}
