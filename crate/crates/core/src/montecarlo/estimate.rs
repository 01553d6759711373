use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

pub const DEFAULT_CI_LEVEL: f64 = 0.99;

/// A Monte Carlo estimate with its confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub ci_level: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Samples dropped as numerically degenerate.
    pub discarded: u64,
}

/// Two-sided normal quantile for the given coverage.
pub fn z_for_level(level: f64) -> f64 {
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    std.inverse_cdf(0.5 + level / 2.0)
}

impl Estimate {
    /// Bernoulli proportion with a Wilson score interval.
    pub fn bernoulli(successes: u64, n: u64, level: f64) -> Self {
        assert!(n > 0 && successes <= n);
        let nf = n as f64;
        let p = successes as f64 / nf;
        let z = z_for_level(level);
        let z2n = z * z / nf;
        let centre = (p + z2n / 2.0) / (1.0 + z2n);
        let half = z / (1.0 + z2n) * (p * (1.0 - p) / nf + z2n / (4.0 * nf)).sqrt();
        Self {
            mean: p,
            stderr: (p * (1.0 - p) / nf).sqrt(),
            n_samples: n,
            ci_level: level,
            // the Wilson interval always contains p̂; min/max guard rounding
            ci_lo: (centre - half).max(0.0).min(p),
            ci_hi: (centre + half).min(1.0).max(p),
            discarded: 0,
        }
    }

    /// Sample mean with a normal interval.
    pub fn from_moments(m: &Moments, level: f64) -> Self {
        assert!(m.n > 0);
        let stderr = if m.n > 1 {
            (m.m2 / (m.n - 1) as f64 / m.n as f64).sqrt()
        } else {
            0.0
        };
        let half = z_for_level(level) * stderr;
        Self {
            mean: m.mean,
            stderr,
            n_samples: m.n,
            ci_level: level,
            ci_lo: m.mean - half,
            ci_hi: m.mean + half,
            discarded: 0,
        }
    }

    /// The estimate of `c·X` for a constant `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        assert!(c > 0.0);
        Self {
            mean: c * self.mean,
            stderr: c * self.stderr,
            ci_lo: c * self.ci_lo,
            ci_hi: c * self.ci_hi,
            ..*self
        }
    }

    pub fn with_discarded(self, discarded: u64) -> Self {
        Self { discarded, ..self }
    }

    pub fn covers(&self, value: f64) -> bool {
        self.ci_lo <= value && value <= self.ci_hi
    }

    /// `(mean - value)/stderr`; zero spread gives 0 on a hit and ±∞ otherwise.
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = self.mean - value;
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

/// Running mean and sum of squared deviations, mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * self.n as f64 * w;
        self.mean += delta * w;
        self.n = n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_at_99_percent() {
        assert!((z_for_level(0.99) - 2.575_829_303_548_901).abs() < 1e-9);
    }

    #[test]
    fn wilson_interval() {
        let e = Estimate::bernoulli(30, 100, 0.95);
        // textbook value for 30/100 at 95%: [0.2189, 0.3958]
        assert!((e.ci_lo - 0.2189).abs() < 1e-4 && (e.ci_hi - 0.3958).abs() < 1e-4);
        assert!((e.stderr - (0.3f64 * 0.7 / 100.0).sqrt()).abs() < 1e-15);
        for (s, n) in [(0, 10), (10, 10), (1, 1_000_000)] {
            let e = Estimate::bernoulli(s, n, DEFAULT_CI_LEVEL);
            assert!(e.ci_lo <= e.mean && e.mean <= e.ci_hi && e.ci_hi > e.ci_lo);
        }
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut merged = Moments::default();
        for part in xs.chunks(77) {
            let mut m = Moments::default();
            part.iter().for_each(|&x| m.push(x));
            merged.merge(&m);
        }
        assert_eq!(merged.n, all.n);
        assert!((merged.mean - all.mean).abs() < 1e-12);
        assert!((merged.m2 - all.m2).abs() < 1e-9 * all.m2);
    }

    #[test]
    fn scaling_and_scores() {
        let e = Estimate::bernoulli(40, 100, DEFAULT_CI_LEVEL).scaled(0.5);
        assert!((e.mean - 0.2).abs() < 1e-15 && e.covers(0.2));
        assert!((e.z_score(e.mean + e.stderr) + 1.0).abs() < 1e-12);
        let mut m = Moments::default();
        m.push(3.0);
        m.push(3.0);
        let flat = Estimate::from_moments(&m, DEFAULT_CI_LEVEL);
        assert_eq!(flat.z_score(3.0), 0.0);
        assert!(flat.z_score(2.0).is_infinite());
    }
}
