use std::collections::{BTreeMap, HashMap};

use super::{
    classify_position, ConsensusSnapshot, DescriptorRecord, Position, StagedModel, StagedRelay,
    UserCountRecord,
};
use crate::error::{Error, Result};
use crate::util::{median, round_half_up};

/// Per-relay statistics plus the number of relays dropped for lack of a descriptor.
#[derive(Clone, Debug, PartialEq)]
pub struct RelayStats {
    pub relays: Vec<StagedRelay>,
    pub missing_descriptors: usize,
}

#[derive(Default)]
struct Presence<'a> {
    present: u64,
    guard: u64,
    exit: u64,
    weights: Vec<f64>,
    latest: Option<(&'a str, &'a str)>,
}

/// Computes r, g, e, w, b, λ, β for every relay seen in `snapshots`.
///
/// `snapshots` must be sorted by timestamp (as returned by `load_snapshots`);
/// the latest snapshot containing a relay supplies its ip and country. Output
/// is ordered by fingerprint.
pub fn compute_relay_stats(
    snapshots: &[ConsensusSnapshot],
    descriptors: &[DescriptorRecord],
) -> Result<RelayStats> {
    if snapshots.is_empty() {
        return Err(Error::Empty("no snapshots".into()));
    }
    let mut presence: BTreeMap<&str, Presence<'_>> = BTreeMap::new();
    for snap in snapshots {
        let weights = snap.normalized_weights();
        for (relay, w) in snap.relays.iter().zip(weights) {
            let p = presence.entry(relay.fingerprint.as_str()).or_default();
            p.present += 1;
            p.guard += relay.guard as u64;
            p.exit += relay.exit as u64;
            p.weights.push(w);
            p.latest = Some((relay.ip.as_str(), relay.country.as_str()));
        }
    }

    let mut by_fp: HashMap<&str, Vec<&DescriptorRecord>> = HashMap::new();
    for d in descriptors {
        by_fp.entry(d.fingerprint.as_str()).or_default().push(d);
    }

    let count = snapshots.len() as f64;
    let mut relays = Vec::with_capacity(presence.len());
    let mut missing = 0;
    for (fp, p) in presence {
        let Some(descs) = by_fp.get(fp) else {
            missing += 1;
            continue;
        };
        let (ip, country) = p.latest.expect("present relay has a latest snapshot");
        let present = p.present as f64;
        let rates: Vec<f64> = descs.iter().map(|d| d.bandwidth_rate).collect();
        let bursts: Vec<f64> = descs.iter().map(|d| d.bandwidth_burst).collect();
        relays.push(StagedRelay {
            fingerprint: fp.to_string(),
            ip: ip.to_string(),
            country: country.to_string(),
            r: present / count,
            g: p.guard as f64 / present,
            e: p.exit as f64 / present,
            w: median(&p.weights).unwrap_or(0.0),
            b: descs
                .iter()
                .map(|d| d.observed_bandwidth)
                .fold(0.0, f64::max),
            lambda: median(&rates).unwrap_or(0.0),
            beta: median(&bursts).unwrap_or(0.0),
        });
    }
    if missing > 0 {
        log::warn!("dropped {missing} relays without descriptors");
    }
    Ok(RelayStats {
        relays,
        missing_descriptors: missing,
    })
}

/// Median per-position relay counts (C) and total normalized weights (W).
pub fn compute_network_stats(
    snapshots: &[ConsensusSnapshot],
) -> Result<(BTreeMap<Position, u64>, BTreeMap<Position, f64>)> {
    if snapshots.is_empty() {
        return Err(Error::Empty("no snapshots".into()));
    }
    let mut counts: BTreeMap<Position, Vec<f64>> = BTreeMap::new();
    let mut weights: BTreeMap<Position, Vec<f64>> = BTreeMap::new();
    for snap in snapshots {
        let mut c: BTreeMap<Position, f64> = Position::ALL.iter().map(|&p| (p, 0.0)).collect();
        let mut w = c.clone();
        for (relay, nw) in snap.relays.iter().zip(snap.normalized_weights()) {
            let pos = classify_position(relay.guard, relay.exit);
            *c.get_mut(&pos).unwrap() += 1.0;
            *w.get_mut(&pos).unwrap() += nw;
        }
        for pos in Position::ALL {
            counts.entry(pos).or_default().push(c[&pos]);
            weights.entry(pos).or_default().push(w[&pos]);
        }
    }
    let c = counts
        .into_iter()
        .map(|(p, v)| (p, round_half_up(median(&v).unwrap()) as u64))
        .collect();
    let w = weights
        .into_iter()
        .map(|(p, v)| (p, median(&v).unwrap()))
        .collect();
    Ok((c, w))
}

/// Median daily probability of a user being in each country, renormalized.
///
/// A country missing from a day's records counts as probability zero for that
/// day. Days whose counts sum to zero are skipped.
pub fn compute_user_probs(records: &[UserCountRecord]) -> Result<BTreeMap<String, f64>> {
    let mut days: BTreeMap<&str, BTreeMap<&str, u64>> = BTreeMap::new();
    for r in records {
        *days
            .entry(r.date.as_str())
            .or_default()
            .entry(r.country.as_str())
            .or_default() += r.count;
    }
    if days.is_empty() {
        return Err(Error::Empty("no user-count records".into()));
    }
    let countries: Vec<&str> = {
        let mut c: Vec<&str> = records.iter().map(|r| r.country.as_str()).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let mut daily: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for counts in days.values() {
        let total: u64 = counts.values().sum();
        if total == 0 {
            continue;
        }
        for &cc in &countries {
            let n = counts.get(cc).copied().unwrap_or(0);
            daily.entry(cc).or_default().push(n as f64 / total as f64);
        }
    }
    if daily.is_empty() {
        return Err(Error::InvalidParam("all user counts are zero".into()));
    }
    let medians: BTreeMap<String, f64> = daily
        .into_iter()
        .map(|(cc, v)| (cc.to_string(), median(&v).unwrap()))
        .collect();
    let total: f64 = medians.values().sum();
    if total <= 0.0 {
        return Err(Error::InvalidParam("median user probabilities are all zero".into()));
    }
    Ok(medians.into_iter().map(|(cc, p)| (cc, p / total)).collect())
}

/// Runs the whole staging pass.
pub fn stage(
    snapshots: &[ConsensusSnapshot],
    descriptors: &[DescriptorRecord],
    users: &[UserCountRecord],
) -> Result<StagedModel> {
    let RelayStats { relays, .. } = compute_relay_stats(snapshots, descriptors)?;
    let (position_counts, position_weights) = compute_network_stats(snapshots)?;
    let user_probs = compute_user_probs(users)?;
    let model = StagedModel {
        relays,
        position_counts,
        position_weights,
        user_probs,
        consensus_count: snapshots.len() as u64,
    };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::staging::SnapshotRelay;

    fn relay(fp: &str, guard: bool, exit: bool, weight: f64) -> SnapshotRelay {
        SnapshotRelay {
            fingerprint: fp.into(),
            ip: format!("10.0.0.{}", fp.len()),
            country: "us".into(),
            guard,
            exit,
            weight,
        }
    }

    fn desc(fp: &str, obs: f64, rate: f64, burst: f64) -> DescriptorRecord {
        DescriptorRecord {
            fingerprint: fp.into(),
            observed_bandwidth: obs,
            bandwidth_rate: rate,
            bandwidth_burst: burst,
        }
    }

    fn snap(ts: i64, relays: Vec<SnapshotRelay>) -> ConsensusSnapshot {
        ConsensusSnapshot {
            timestamp: ts,
            relays,
        }
    }

    #[test]
    fn running_fraction_counts_presence() {
        let snaps: Vec<_> = (0..4)
            .map(|t| {
                let mut rs = vec![relay("B", false, false, 1.0)];
                if t != 2 {
                    rs.push(relay("A", false, false, 1.0));
                }
                snap(t, rs)
            })
            .collect();
        let stats = compute_relay_stats(&snaps, &[desc("A", 1.0, 1.0, 1.0), desc("B", 1.0, 1.0, 1.0)])
            .unwrap();
        assert_eq!(stats.relays[0].fingerprint, "A");
        assert_eq!(stats.relays[0].r, 0.75);
        assert_eq!(stats.relays[1].r, 1.0);
    }

    #[test]
    fn guard_fraction_uses_presence_denominator() {
        let snaps = vec![
            snap(0, vec![relay("A", true, false, 1.0)]),
            snap(1, vec![relay("B", false, false, 1.0)]),
            snap(2, vec![relay("A", false, true, 1.0)]),
        ];
        let stats = compute_relay_stats(&snaps, &[desc("A", 1.0, 1.0, 1.0), desc("B", 1.0, 1.0, 1.0)])
            .unwrap();
        let a = &stats.relays[0];
        assert_eq!(a.g, 0.5);
        assert_eq!(a.e, 0.5);
    }

    #[test]
    fn weights_normalize_per_snapshot() {
        let snaps: Vec<_> = (0..3)
            .map(|t| snap(t, vec![relay("A", false, false, 2.0), relay("B", false, false, 2.0)]))
            .collect();
        let stats = compute_relay_stats(&snaps, &[desc("A", 1.0, 1.0, 1.0), desc("B", 1.0, 1.0, 1.0)])
            .unwrap();
        assert_eq!(stats.relays[0].w, 0.5);
    }

    #[test]
    fn bandwidth_max_and_token_medians() {
        let snaps = vec![snap(0, vec![relay("A", false, false, 1.0)])];
        let descs = [
            desc("A", 10.0, 1.0, 100.0),
            desc("A", 30.0, 3.0, 300.0),
            desc("A", 20.0, 2.0, 400.0),
            desc("A", 5.0, 7.0, 500.0),
        ];
        let a = &compute_relay_stats(&snaps, &descs).unwrap().relays[0];
        assert_eq!(a.b, 30.0);
        assert_eq!(a.lambda, 2.5);
        assert_eq!(a.beta, 350.0);
    }

    #[test]
    fn relays_without_descriptors_are_dropped() {
        let snaps = vec![snap(0, vec![relay("A", false, false, 1.0), relay("B", false, false, 1.0)])];
        let stats = compute_relay_stats(&snaps, &[desc("A", 1.0, 1.0, 1.0)]).unwrap();
        assert_eq!(stats.relays.len(), 1);
        assert_eq!(stats.missing_descriptors, 1);
    }

    #[test]
    fn latest_snapshot_wins_for_location() {
        let mut late = relay("A", false, false, 1.0);
        late.country = "de".into();
        late.ip = "9.9.9.9".into();
        let snaps = vec![snap(0, vec![relay("A", false, false, 1.0)]), snap(1, vec![late])];
        let a = &compute_relay_stats(&snaps, &[desc("A", 1.0, 1.0, 1.0)]).unwrap().relays[0];
        assert_eq!((a.ip.as_str(), a.country.as_str()), ("9.9.9.9", "de"));
    }

    #[test]
    fn network_counts_use_medians() {
        let one = vec![snap(0, (0..4).map(|i| relay(&i.to_string(), false, false, 1.0)).collect())];
        let (c, w) = compute_network_stats(&one).unwrap();
        assert_eq!(c[&Position::M], 4);
        assert_eq!(c[&Position::G], 0);
        assert!((w[&Position::M] - 1.0).abs() < 1e-12);

        let sized = |ts: i64, n: usize| {
            snap(ts, (0..n).map(|i| relay(&i.to_string(), true, false, 1.0)).collect())
        };
        let odd = vec![sized(0, 10), sized(1, 20), sized(2, 30)];
        assert_eq!(compute_network_stats(&odd).unwrap().0[&Position::G], 20);
        let even = vec![sized(0, 10), sized(1, 20)];
        assert_eq!(compute_network_stats(&even).unwrap().0[&Position::G], 15);
        // 10 and 11 -> 10.5 rounds half-up
        let half = vec![sized(0, 10), sized(1, 11)];
        assert_eq!(compute_network_stats(&half).unwrap().0[&Position::G], 11);
    }

    fn users(date: &str, cc: &str, count: u64) -> UserCountRecord {
        UserCountRecord {
            date: date.into(),
            country: cc.into(),
            count,
        }
    }

    #[test]
    fn user_probs_symmetric_day() {
        let u = compute_user_probs(&[users("d1", "us", 50), users("d1", "de", 50)]).unwrap();
        assert_eq!(u["us"], 0.5);
        assert_eq!(u["de"], 0.5);
    }

    #[test]
    fn user_probs_take_daily_median_then_renormalize() {
        let recs = [
            users("d1", "us", 20),
            users("d1", "de", 80),
            users("d2", "us", 40),
            users("d2", "de", 60),
            users("d3", "us", 90),
            users("d3", "de", 10),
        ];
        let u = compute_user_probs(&recs).unwrap();
        // medians: us 0.4, de 0.6; already sum to 1
        assert!((u["us"] - 0.4).abs() < 1e-12);
        assert!((u["de"] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn user_probs_single_country_and_zero_counts() {
        let u = compute_user_probs(&[users("d1", "fr", 7), users("d2", "fr", 3)]).unwrap();
        assert_eq!(u["fr"], 1.0);
        assert!(compute_user_probs(&[users("d1", "fr", 0)]).is_err());
    }
}
