use rand::Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal, Pareto};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `[rate]`
    Exponential,
    /// `[mu, sigma]` of the underlying normal
    LogNormal,
    /// `[mean, std_dev]`
    Normal,
    /// `[scale, shape]`
    Pareto,
    /// `[lo, hi]`
    Uniform,
}

/// An emission distribution. Samples are durations, so negative draws are
/// truncated to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub family: Family,
    pub params: Vec<f64>,
}

impl DistributionSpec {
    pub fn new(family: Family, params: Vec<f64>) -> Result<Self> {
        let spec = Self { family, params };
        spec.validate()?;
        Ok(spec)
    }

    pub fn exponential(rate: f64) -> Self {
        Self::new(Family::Exponential, vec![rate]).expect("valid exponential rate")
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        Self::new(Family::Uniform, vec![lo, hi]).expect("valid uniform bounds")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::InvalidParam(format!("{:?} {:?}: {why}", self.family, self.params)));
        if self.params.len() != 2 && self.family != Family::Exponential
            || self.family == Family::Exponential && self.params.len() != 1
        {
            return bad("wrong parameter count");
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return bad("non-finite parameter");
        }
        let p = &self.params;
        match self.family {
            Family::Exponential if p[0] <= 0.0 => bad("rate must be > 0"),
            Family::LogNormal | Family::Normal if p[1] < 0.0 => bad("spread must be >= 0"),
            Family::Pareto if p[0] <= 0.0 || p[1] <= 0.0 => bad("scale and shape must be > 0"),
            Family::Uniform if p[0] > p[1] => bad("lo must be <= hi"),
            _ => Ok(()),
        }
    }

    /// Draws one nonnegative sample. Assumes `validate` passed.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p = &self.params;
        let x = match self.family {
            Family::Exponential => Exp::new(p[0]).unwrap().sample(rng),
            Family::LogNormal => LogNormal::new(p[0], p[1]).unwrap().sample(rng),
            Family::Normal => Normal::new(p[0], p[1]).unwrap().sample(rng),
            Family::Pareto => Pareto::new(p[0], p[1]).unwrap().sample(rng),
            Family::Uniform => {
                if p[0] == p[1] {
                    p[0]
                } else {
                    rng.random_range(p[0]..p[1])
                }
            }
        };
        x.max(0.0)
    }

    pub fn mean(&self) -> f64 {
        let p = &self.params;
        match self.family {
            Family::Exponential => 1.0 / p[0],
            Family::LogNormal => (p[0] + p[1] * p[1] / 2.0).exp(),
            Family::Normal => p[0],
            Family::Pareto if p[1] > 1.0 => p[1] * p[0] / (p[1] - 1.0),
            Family::Pareto => f64::INFINITY,
            Family::Uniform => (p[0] + p[1]) / 2.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::seeded_rng;

    #[test]
    fn degenerate_uniform() {
        let mut rng = seeded_rng(1, &[]);
        let d = DistributionSpec::uniform(5.0, 5.0);
        assert!((0..100).all(|_| d.sample(&mut rng) == 5.0));
    }

    #[test]
    fn exponential_sample_mean() {
        let mut rng = seeded_rng(2, &[]);
        let rate = 0.25;
        let d = DistributionSpec::exponential(rate);
        let n = 100_000;
        let mean = (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0 / rate).abs() / (1.0 / rate) < 0.02, "{mean}");
    }

    #[test]
    fn negative_normal_truncates() {
        let mut rng = seeded_rng(3, &[]);
        let d = DistributionSpec::new(Family::Normal, vec![-10.0, 0.1]).unwrap();
        assert!((0..1000).all(|_| d.sample(&mut rng) == 0.0));
    }

    #[test]
    fn invalid_parameters() {
        assert!(DistributionSpec::new(Family::Exponential, vec![0.0]).is_err());
        assert!(DistributionSpec::new(Family::Uniform, vec![2.0, 1.0]).is_err());
        assert!(DistributionSpec::new(Family::Pareto, vec![1.0, 0.0]).is_err());
        assert!(DistributionSpec::new(Family::LogNormal, vec![1.0]).is_err());
        assert!(DistributionSpec::new(Family::Normal, vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn every_family_is_nonnegative() {
        let mut rng = seeded_rng(4, &[]);
        let specs = [
            DistributionSpec::new(Family::LogNormal, vec![0.0, 2.0]).unwrap(),
            DistributionSpec::new(Family::Normal, vec![0.0, 1.0]).unwrap(),
            DistributionSpec::new(Family::Pareto, vec![1.0, 1.5]).unwrap(),
            DistributionSpec::new(Family::Uniform, vec![-1.0, 1.0]).unwrap(),
        ];
        for d in &specs {
            assert!((0..1000).all(|_| d.sample(&mut rng) >= 0.0));
        }
    }
}
