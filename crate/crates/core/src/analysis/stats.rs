//! Sample statistics and the 3σ acceptance rules.

use serde::{Deserialize, Serialize};

/// Multiplier on the standard error used by every statistical verdict.
pub const SIGMA_SLACK: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    /// Standard error of the mean.
    pub se: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self { mean: f64::NAN, se: f64::NAN, n };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        Self { mean, se: (var / n as f64).sqrt(), n }
    }

    pub fn of_counts(xs: &[u64]) -> Self {
        Self::of(&xs.iter().map(|&x| x as f64).collect::<Vec<_>>())
    }

    /// |mean − target| ≤ 3 se (plus a rounding floor).
    pub fn matches(&self, target: f64) -> bool {
        (self.mean - target).abs() <= SIGMA_SLACK * self.se + 1e-12
    }

    /// mean ≤ bound + 3 se
    pub fn below(&self, bound: f64) -> bool {
        self.mean <= bound + SIGMA_SLACK * self.se + 1e-12
    }

    /// mean ≥ bound − 3 se
    pub fn above(&self, bound: f64) -> bool {
        self.mean >= bound - SIGMA_SLACK * self.se - 1e-12
    }
}

/// Observed rate ≤ b + 3√(b(1−b)/n), with b clamped to [0, 1].
pub fn rate_below(hits: usize, n: usize, bound: f64) -> bool {
    let b = bound.clamp(0.0, 1.0);
    hits as f64 / n as f64 <= b + SIGMA_SLACK * (b * (1.0 - b) / n as f64).sqrt() + 1e-12
}

/// Observed rate ≥ b − 3√(b(1−b)/n).
pub fn rate_above(hits: usize, n: usize, bound: f64) -> bool {
    let b = bound.clamp(0.0, 1.0);
    hits as f64 / n as f64 >= b - SIGMA_SLACK * (b * (1.0 - b) / n as f64).sqrt() - 1e-12
}

/// Two-sided test of a rate against its exact probability.
pub fn rate_matches(hits: usize, n: usize, p: f64) -> bool {
    let p = p.clamp(0.0, 1.0);
    (hits as f64 / n as f64 - p).abs() <= SIGMA_SLACK * (p * (1.0 - p) / n as f64).sqrt() + 1e-12
}

/// Two-sample z-test of equal means at 3σ.
pub fn same_mean(a: &MeanEstimate, b: &MeanEstimate) -> bool {
    (a.mean - b.mean).abs() <= SIGMA_SLACK * (a.se * a.se + b.se * b.se).sqrt() + 1e-12
}

/// Pearson correlation and its null standard error 1/√n.
pub fn correlation(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len().min(y.len());
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (a, b) = (x[i] - mx, y[i] - my);
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    let rho = if sxx > 0.0 && syy > 0.0 { sxy / (sxx * syy).sqrt() } else { 0.0 };
    (rho, 1.0 / (n as f64).sqrt())
}
