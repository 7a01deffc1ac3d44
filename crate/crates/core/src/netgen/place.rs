use std::collections::BTreeMap;

use rand::Rng;

use super::map::InternetMap;
use crate::error::{Error, Result};

/// Redraws of the country before falling back to a uniform city.
const COUNTRY_RETRIES: usize = 16;

fn uniform_city<R: Rng + ?Sized>(map: &InternetMap, rng: &mut R) -> Result<usize> {
    if map.cities().is_empty() {
        return Err(Error::Schema("internet map has no cities".into()));
    }
    Ok(rng.random_range(0..map.cities().len()))
}

/// A uniformly random city in `country`, or any city if the country is absent.
pub fn place_relay<R: Rng + ?Sized>(country: &str, map: &InternetMap, rng: &mut R) -> Result<usize> {
    let local = map.cities_in(country);
    if local.is_empty() {
        uniform_city(map, rng)
    } else {
        Ok(local[rng.random_range(0..local.len())])
    }
}

/// Places `count` clients: each draws a country from `user_probs` and then a
/// uniform city in it. Countries without cities are redrawn a bounded number
/// of times before falling back to a uniform city.
pub fn place_clients<R: Rng + ?Sized>(
    user_probs: &BTreeMap<String, f64>,
    map: &InternetMap,
    count: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let countries: Vec<(&str, f64)> = user_probs.iter().map(|(c, &p)| (c.as_str(), p)).collect();
    let total: f64 = countries.iter().map(|c| c.1).sum();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut placed = None;
        for _ in 0..COUNTRY_RETRIES {
            let mut u = rng.random::<f64>() * total;
            let mut cc = countries.last().map(|c| c.0).unwrap_or("");
            for &(c, p) in &countries {
                if u < p {
                    cc = c;
                    break;
                }
                u -= p;
            }
            let local = map.cities_in(cc);
            if !local.is_empty() {
                placed = Some(local[rng.random_range(0..local.len())]);
                break;
            }
        }
        out.push(match placed {
            Some(c) => c,
            None => uniform_city(map, rng)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::map::City;
    use crate::traffic::seeded_rng;

    fn map(cities: &[(&str, &str)]) -> InternetMap {
        InternetMap::new(
            "test",
            cities
                .iter()
                .map(|&(id, cc)| City {
                    id: id.into(),
                    country: cc.into(),
                    bandwidth_up: 1,
                    bandwidth_down: 1,
                })
                .collect(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn relay_lands_in_its_only_city() {
        let m = map(&[("a", "us"), ("b", "de")]);
        let mut rng = seeded_rng(1, &[]);
        assert!((0..100).all(|_| place_relay("de", &m, &mut rng).unwrap() == 1));
    }

    #[test]
    fn absent_country_falls_back() {
        let m = map(&[("a", "us"), ("b", "de")]);
        let mut rng = seeded_rng(1, &[]);
        assert!(place_relay("jp", &m, &mut rng).unwrap() < 2);
        assert!(place_relay("jp", &map(&[]), &mut rng).is_err());
    }

    #[test]
    fn two_cities_split_evenly() {
        let m = map(&[("a", "us"), ("b", "us"), ("c", "de")]);
        let mut rng = seeded_rng(2, &[]);
        let n = 10_000;
        let a = (0..n).filter(|_| place_relay("us", &m, &mut rng).unwrap() == 0).count() as f64;
        assert!((a - 5000.0).abs() < 3.0 * 50.0, "{a}");
    }

    #[test]
    fn clients_follow_country_distribution() {
        let m = map(&[("a", "us"), ("b", "us"), ("c", "us"), ("d", "de")]);
        let mut rng = seeded_rng(3, &[]);
        let only_us: BTreeMap<String, f64> = [("us".to_string(), 1.0)].into();
        assert!(place_clients(&only_us, &m, 500, &mut rng).unwrap().iter().all(|&c| c < 3));
        assert!(place_clients(&only_us, &m, 0, &mut rng).unwrap().is_empty());

        let half: BTreeMap<String, f64> = [("us".to_string(), 0.5), ("de".to_string(), 0.5)].into();
        let n = 10_000;
        let us = place_clients(&half, &m, n, &mut rng).unwrap().iter().filter(|&&c| c < 3).count();
        assert!((us as f64 - 5000.0).abs() < 3.0 * 50.0, "{us}");
    }

    #[test]
    fn countries_without_cities_are_redrawn() {
        let m = map(&[("a", "us")]);
        let probs: BTreeMap<String, f64> = [("us".to_string(), 0.5), ("zz".to_string(), 0.5)].into();
        let mut rng = seeded_rng(4, &[]);
        assert!(place_clients(&probs, &m, 100, &mut rng).unwrap().iter().all(|&c| c == 0));
    }
}
