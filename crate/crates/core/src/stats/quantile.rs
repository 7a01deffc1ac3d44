use crate::error::{Error, Result};

/// Sorted samples from one simulation, with their reporting resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
    pub resolution: f64,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>, resolution: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("empirical distribution has no samples".into()));
        }
        if samples.iter().any(|s| s.is_nan()) {
            return Err(Error::InvalidParam("NaN sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self {
            samples,
            resolution,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Empirical inverse CDF: linear interpolation between order statistics
    /// at rank (len − 1)·q.
    pub fn inverse_cdf(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidParam(format!("quantile {q} not in (0,1]")));
        }
        let s = &self.samples;
        let h = (s.len() - 1) as f64 * q;
        let lo = h.floor() as usize;
        if lo + 1 >= s.len() {
            return Ok(s[s.len() - 1]);
        }
        let frac = h - lo as f64;
        Ok(s[lo] + frac * (s[lo + 1] - s[lo]))
    }
}

/// Quantiles at which distributions are estimated.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantileGrid(Vec<f64>);

impl QuantileGrid {
    pub fn new(qs: Vec<f64>) -> Result<Self> {
        if qs.is_empty() {
            return Err(Error::Empty("quantile grid".into()));
        }
        if qs.iter().any(|&q| !(q > 0.0 && q <= 1.0)) || qs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParam(
                "quantile grid must be strictly increasing within (0,1]".into(),
            ));
        }
        Ok(Self(qs))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl Default for QuantileGrid {
    /// 0.01, 0.02, …, 0.99 and 0.999.
    fn default() -> Self {
        let mut qs: Vec<f64> = (1..=99).map(|i| i as f64 / 100.0).collect();
        qs.push(0.999);
        Self(qs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_and_interpolated_quantiles() {
        let d = EmpiricalDistribution::new(vec![5.0, 3.0, 1.0, 4.0, 2.0], 0.0).unwrap();
        assert_eq!(d.inverse_cdf(0.5).unwrap(), 3.0);
        assert_eq!(d.inverse_cdf(1.0).unwrap(), 5.0);
        let d = EmpiricalDistribution::new(vec![1.0, 3.0], 0.0).unwrap();
        assert_eq!(d.inverse_cdf(0.5).unwrap(), 2.0);
        assert!(d.inverse_cdf(0.0).is_err());
        assert!(EmpiricalDistribution::new(vec![], 0.0).is_err());
    }

    #[test]
    fn default_grid() {
        let g = QuantileGrid::default();
        assert_eq!(g.values().len(), 100);
        assert_eq!(*g.values().last().unwrap(), 0.999);
        assert!(QuantileGrid::new(vec![0.5, 0.5]).is_err());
    }

    proptest! {
        #[test]
        fn inverse_cdf_is_monotone(
            xs in prop::collection::vec(-1e6f64..1e6, 1..200),
            a in 1e-6f64..=1.0,
            b in 1e-6f64..=1.0,
        ) {
            let d = EmpiricalDistribution::new(xs, 0.0).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(d.inverse_cdf(lo).unwrap() <= d.inverse_cdf(hi).unwrap());
        }
    }
}
