//! Small helpers for Monte-Carlo estimates.

use crate::math;

/// A sample mean together with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { mean: 0.0, stderr: 0.0 };

    /// Estimate of a probability from `hits` successes in `trials` Bernoulli draws.
    pub fn from_hits(hits: u64, trials: u64) -> Self {
        if trials == 0 {
            return Self::ZERO;
        }
        let p = hits as f64 / trials as f64;
        Estimate {
            mean: p,
            stderr: math::sqrt(p * (1.0 - p) / trials as f64),
        }
    }

    /// Ratio estimate `Σ num / Σ den` over independent batches, with the
    /// standard error of the ratio estimator across batches.
    ///
    /// Samples within a batch may be dependent; batches must not be. With
    /// fewer than two batches the standard error is infinite.
    pub fn ratio(batches: &[(f64, f64)]) -> Self {
        let num: f64 = batches.iter().map(|b| b.0).sum();
        let den: f64 = batches.iter().map(|b| b.1).sum();
        if den <= 0.0 {
            return Self::ZERO;
        }
        let mean = num / den;
        let t = batches.len();
        if t < 2 {
            return Estimate {
                mean,
                stderr: f64::INFINITY,
            };
        }
        let avg_den = den / t as f64;
        let ss: f64 = batches.iter().map(|&(x, y)| (x - mean * y) * (x - mean * y)).sum();
        Estimate {
            mean,
            stderr: math::sqrt(ss / (t as f64 * (t - 1) as f64)) / avg_den,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Estimate {
            mean: self.mean * factor,
            stderr: self.stderr * factor.abs(),
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    ///
    /// A zero standard error degenerates to exact equality up to `1e-12`.
    pub fn consistent_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr + 1e-12
    }
}

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        if self.count == 0 {
            return Estimate::ZERO;
        }
        Estimate {
            mean: self.mean,
            stderr: math::sqrt(self.variance() / self.count as f64),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, 2.0, 8.0, 5.0];
        let mut acc = Accumulator::new();
        for &x in &xs {
            acc.push(x);
        }
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 4.0;
        assert!((acc.mean() - mean).abs() < 1e-12);
        assert!((acc.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn ratio_of_equal_batches_is_exact() {
        let e = Estimate::ratio(&[(2.0, 4.0), (3.0, 6.0), (1.0, 2.0)]);
        assert!((e.mean - 0.5).abs() < 1e-15);
        assert!(e.stderr < 1e-15);
        assert!(Estimate::ratio(&[(1.0, 2.0)]).stderr.is_infinite());
        assert_eq!(Estimate::ratio(&[]), Estimate::ZERO);
    }

    #[test]
    fn zero_stderr_means_exact() {
        let e = Estimate::from_hits(0, 100);
        assert!(e.consistent_with(0.0, 3.0));
        assert!(!e.consistent_with(0.01, 3.0));
    }
}
