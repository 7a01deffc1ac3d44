use rand::Rng;
use rand_distr::{Distribution, Exp};

/// Microseconds in a 10-minute window.
pub const MICROS_PER_10_MIN: f64 = 6.0e8;

/// Per-client circuit arrivals: a Poisson process with τ circuits per
/// 10 minutes, so inter-arrival delays are exponential with mean μ/τ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitProcess {
    pub tau: f64,
}

impl CircuitProcess {
    pub fn new(tau: f64) -> Self {
        assert!(tau >= 0.0 && tau.is_finite(), "tau must be finite and >= 0");
        Self { tau }
    }

    pub fn mean_delay_us(&self) -> f64 {
        MICROS_PER_10_MIN / self.tau
    }

    /// Delay in microseconds until the next circuit, or `None` when τ = 0.
    pub fn next_delay<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        if self.tau == 0.0 {
            return None;
        }
        Some(Exp::new(self.tau / MICROS_PER_10_MIN).unwrap().sample(rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::seeded_rng;

    fn moments(tau: f64, n: usize) -> (f64, f64) {
        let p = CircuitProcess::new(tau);
        let mut rng = seeded_rng(99, &[]);
        let xs: Vec<f64> = (0..n).map(|_| p.next_delay(&mut rng).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (mean, var.sqrt() / mean)
    }

    #[test]
    fn one_circuit_per_window_means_600s() {
        assert_eq!(CircuitProcess::new(1.0).mean_delay_us(), 600e6);
        let (mean, _) = moments(1.0, 100_000);
        assert!((mean / 600e6 - 1.0).abs() < 0.02);
    }

    #[test]
    fn poisson_coefficient_of_variation() {
        let (mean, cv) = moments(188.1313, 100_000);
        assert!((mean / 3.1893e6 - 1.0).abs() < 0.02, "{mean}");
        assert!((cv - 1.0).abs() < 0.05, "{cv}");
    }

    #[test]
    fn zero_rate_never_fires() {
        let mut rng = seeded_rng(1, &[]);
        assert_eq!(CircuitProcess::new(0.0).next_delay(&mut rng), None);
    }
}
