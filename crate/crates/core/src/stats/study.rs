//! Monte-Carlo study of confidence-interval width against the number of
//! sampled networks.
//!
//! For every (quantile, trial) a cross-network standard deviation is drawn
//! from N(1, 1) truncated at zero. For each n, the first n of a shared
//! sequence of standard normals are standardized to population standard
//! deviation one and scaled by that draw, giving n per-network values whose
//! spread is exactly the drawn σ. With zero within-network error the width is
//! 2ε = 2σ·t(α, n−1)/√(n−1). The same draws are reused for every n, so the
//! median width varies with n only through t/√(n−1).

use rand_distr::{Distribution, Normal, StandardNormal};

use super::estimate::combine;
use super::tdist::t_value;
use crate::error::{Error, Result};
use crate::traffic::seeded_rng;
use crate::util::{mean, median, population_std};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WidthRow {
    pub networks: usize,
    pub q: f64,
    pub median_width: f64,
}

pub fn ci_width_study(
    networks: &[usize],
    quantiles: &[f64],
    trials: usize,
    seed: u64,
    confidence: f64,
) -> Result<Vec<WidthRow>> {
    if trials == 0 {
        return Ok(Vec::new());
    }
    if networks.iter().any(|&n| !(2..=100).contains(&n)) {
        return Err(Error::InvalidParam("network counts must lie in [2, 100]".into()));
    }
    let max_n = networks.iter().copied().max().unwrap_or(2);
    let t_values: Vec<f64> = networks
        .iter()
        .map(|&n| t_value(confidence, (n - 1) as f64))
        .collect::<Result<_>>()?;
    let sigma_dist = Normal::<f64>::new(1.0, 1.0).unwrap();

    let mut widths = vec![vec![Vec::with_capacity(trials); networks.len()]; quantiles.len()];
    let mut z = vec![0.0; max_n];
    let mut values = vec![0.0; max_n];
    let zeros = vec![0.0; max_n];
    for (k, &q) in quantiles.iter().enumerate() {
        for trial in 0..trials {
            let mut rng = seeded_rng(seed, &[k as u64, trial as u64]);
            let sigma: f64 = sigma_dist.sample(&mut rng).max(0.0);
            for zi in z.iter_mut() {
                *zi = StandardNormal.sample(&mut rng);
            }
            for (j, &n) in networks.iter().enumerate() {
                let head = &z[..n];
                let (m, sd) = (mean(head), population_std(head));
                for (v, zi) in values.iter_mut().zip(head) {
                    *v = q + sigma * (zi - m) / sd;
                }
                let (_, _, _, epsilon) = combine(&values[..n], &zeros[..n], t_values[j]);
                widths[k][j].push(2.0 * epsilon);
            }
        }
    }

    let mut rows = Vec::with_capacity(networks.len() * quantiles.len());
    for (j, &n) in networks.iter().enumerate() {
        for (k, &q) in quantiles.iter().enumerate() {
            rows.push(WidthRow {
                networks: n,
                q,
                median_width: median(&widths[k][j]).unwrap(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_is_empty() {
        assert!(ci_width_study(&[2, 3], &[0.5], 0, 1, 0.95).unwrap().is_empty());
    }

    #[test]
    fn rejects_out_of_range_counts() {
        assert!(ci_width_study(&[1, 3], &[0.5], 10, 1, 0.95).is_err());
    }

    #[test]
    fn width_drops_quickly() {
        let ns: Vec<usize> = (2..=10).collect();
        let rows = ci_width_study(&ns, &[0.5], 200, 9, 0.95).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].median_width < pair[0].median_width);
        }
        assert!(rows[8].median_width / rows[0].median_width < 0.1);
    }
}
