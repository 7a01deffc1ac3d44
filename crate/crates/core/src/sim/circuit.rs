//! Weighted three-hop circuit selection and path latency.

use rand::Rng;

use crate::error::{Error, Result};
use crate::netgen::InternetMap;

/// One-way latency used when the map has no edge between two cities.
pub const FALLBACK_LATENCY_US: u64 = 50_000;

/// A relay as seen by path selection.
#[derive(Clone, Debug, PartialEq)]
pub struct RelayCandidate {
    pub guard: bool,
    pub exit: bool,
    pub weight: f64,
}

/// Relay indices refer to the candidate list given to [`build_circuit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircuitPath {
    pub guard: usize,
    pub middle: usize,
    pub exit: usize,
}

impl CircuitPath {
    pub fn relays(&self) -> [usize; 3] {
        [self.guard, self.middle, self.exit]
    }
}

/// Picks an index from `candidates` with probability proportional to its
/// weight, or uniformly when every weight is zero.
fn pick<R: Rng + ?Sized>(candidates: &[usize], weights: impl Fn(usize) -> f64, rng: &mut R) -> Option<usize> {
    if candidates.is_empty() {
        return None;
    }
    let total: f64 = candidates.iter().map(|&i| weights(i)).sum();
    if !(total > 0.0) {
        return Some(candidates[rng.random_range(0..candidates.len())]);
    }
    let mut x = rng.random::<f64>() * total;
    for &i in candidates {
        let w = weights(i);
        if x < w {
            return Some(i);
        }
        x -= w;
    }
    // Rounding left x just above the last positive weight.
    candidates.iter().rev().copied().find(|&i| weights(i) > 0.0)
}

/// Draws guard, exit and middle in that order, each proportional to weight
/// among the eligible relays not already on the path.
pub fn build_circuit<R: Rng + ?Sized>(relays: &[RelayCandidate], rng: &mut R) -> Result<CircuitPath> {
    let weight = |i: usize| relays[i].weight.max(0.0);
    let guards: Vec<usize> = (0..relays.len()).filter(|&i| relays[i].guard).collect();
    let guard = pick(&guards, weight, rng).ok_or_else(|| Error::Circuit("no guard-flagged relay".into()))?;
    let exits: Vec<usize> = (0..relays.len()).filter(|&i| relays[i].exit && i != guard).collect();
    let exit = pick(&exits, weight, rng)
        .ok_or_else(|| Error::Circuit("no exit-flagged relay distinct from the guard".into()))?;
    let middles: Vec<usize> = (0..relays.len()).filter(|&i| i != guard && i != exit).collect();
    let middle = pick(&middles, weight, rng).ok_or_else(|| Error::Circuit("no relay left for the middle".into()))?;
    Ok(CircuitPath { guard, middle, exit })
}

/// One-way latency between two map cities, falling back to
/// [`FALLBACK_LATENCY_US`] when there is no edge.
pub fn hop_latency_us(map: &InternetMap, a: usize, b: usize) -> u64 {
    map.latency_us(a, b).unwrap_or(FALLBACK_LATENCY_US)
}

/// Round trip along client, guard, middle, exit, server given their cities.
pub fn path_rtt(map: &InternetMap, cities: [usize; 5]) -> u64 {
    2 * cities.windows(2).map(|w| hop_latency_us(map, w[0], w[1])).sum::<u64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{City, MapEdge};
    use crate::traffic::seeded_rng;

    fn relay(guard: bool, exit: bool, weight: f64) -> RelayCandidate {
        RelayCandidate { guard, exit, weight }
    }

    #[test]
    fn unique_path() {
        let relays = [relay(true, false, 1.0), relay(false, false, 1.0), relay(false, true, 1.0)];
        let mut rng = seeded_rng(1, &[]);
        for _ in 0..100 {
            let p = build_circuit(&relays, &mut rng).unwrap();
            assert_eq!(p, CircuitPath { guard: 0, middle: 1, exit: 2 });
        }
    }

    #[test]
    fn guard_frequency_follows_weight() {
        let relays = [
            relay(true, false, 0.9),
            relay(true, false, 0.1),
            relay(false, false, 1.0),
            relay(false, true, 1.0),
        ];
        let mut rng = seeded_rng(2, &[]);
        let n = 100_000;
        let first = (0..n).filter(|_| build_circuit(&relays, &mut rng).unwrap().guard == 0).count();
        let p = first as f64 / n as f64;
        assert!((p - 0.9).abs() < 3.0 * (0.09f64 / n as f64).sqrt() + 1e-3, "{p}");
    }

    #[test]
    fn exit_must_differ_from_guard() {
        let relays = [relay(true, true, 1.0), relay(false, false, 1.0)];
        let mut rng = seeded_rng(3, &[]);
        assert!(matches!(build_circuit(&relays, &mut rng), Err(Error::Circuit(_))));
    }

    #[test]
    fn missing_positions_fail() {
        let mut rng = seeded_rng(3, &[]);
        assert!(build_circuit(&[relay(false, true, 1.0), relay(false, false, 1.0)], &mut rng).is_err());
        assert!(build_circuit(&[relay(true, false, 1.0), relay(false, true, 1.0)], &mut rng).is_err());
    }

    #[test]
    fn zero_weights_pick_uniformly() {
        let relays = [
            relay(true, false, 0.0),
            relay(true, false, 0.0),
            relay(false, false, 0.0),
            relay(false, true, 0.0),
        ];
        let mut rng = seeded_rng(4, &[]);
        let first = (0..10_000).filter(|_| build_circuit(&relays, &mut rng).unwrap().guard == 0).count();
        assert!((4_500..5_500).contains(&first));
    }

    fn city(id: &str) -> City {
        City {
            id: id.into(),
            country: "us".into(),
            bandwidth_up: 1,
            bandwidth_down: 1,
        }
    }

    fn edge(a: &str, b: &str, latency_us: u64) -> MapEdge {
        MapEdge {
            a: a.into(),
            b: b.into(),
            latency_us,
            packet_loss: 0.0,
        }
    }

    #[test]
    fn rtt_sums_four_hops_twice() {
        let cities = ["a", "b", "c", "d", "e"].map(city).to_vec();
        let edges = vec![
            edge("a", "b", 10_000),
            edge("b", "c", 10_000),
            edge("d", "c", 10_000),
            edge("d", "e", 10_000),
        ];
        let map = InternetMap::new("t", cities, edges).unwrap();
        assert_eq!(path_rtt(&map, [0, 1, 2, 3, 4]), 80_000);
        // a to c has no edge.
        assert_eq!(path_rtt(&map, [0, 2, 2, 3, 4]), 2 * (50_000 + 50_000 + 10_000 + 10_000));
    }

    #[test]
    fn zero_latency_and_single_city() {
        let map = InternetMap::new("t", vec![city("a"), city("b")], vec![edge("a", "b", 0)]).unwrap();
        assert_eq!(path_rtt(&map, [0, 1, 0, 1, 0]), 0);
        assert_eq!(path_rtt(&map, [0; 5]), 2 * 4 * FALLBACK_LATENCY_US);
    }
}
