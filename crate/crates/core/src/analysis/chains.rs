//! Classical simulations of the reflection chains and their closed forms.

use rand::Rng;

/// Reflection count of T from an initial state with φ-overlap p0, ψ-overlap p.
/// The first step is a bare φ-measurement; every later attempt costs two.
pub fn simulate_t_chain<R: Rng + ?Sized>(p: f64, p0: f64, rng: &mut R) -> u64 {
    if rng.gen::<f64>() < p0 {
        return 1;
    }
    let c = 4.0 * p * (1.0 - p);
    let mut n = 1;
    loop {
        n += 2;
        if rng.gen::<f64>() < c {
            return n;
        }
    }
}

/// ⟨n⟩ = p0 + (1 − p0)(1 + 1/(2pq))
pub fn t_mean(p: f64, p0: f64) -> f64 {
    if p0 >= 1.0 {
        return 1.0;
    }
    p0 + (1.0 - p0) * (1.0 + 1.0 / (2.0 * p * (1.0 - p)))
}

/// ⟨Γ^n⟩ for the T chain; infinite once Γ²(q − p)² ≥ 1.
pub fn t_gamma_moment(p: f64, p0: f64, gamma: f64) -> f64 {
    let c = 4.0 * p * (1.0 - p);
    let g2 = gamma * gamma;
    let denom = 1.0 - (1.0 - c) * g2;
    if p0 >= 1.0 {
        return gamma;
    }
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    gamma * (p0 + (1.0 - p0) * c * g2 / denom)
}

/// (success, reflections) of T'_x at overlap p.
pub fn simulate_tx_prime_chain<R: Rng + ?Sized>(p: f64, rng: &mut R) -> (bool, u64) {
    let q = 1.0 - p;
    let mut n = 1;
    if rng.gen::<f64>() < p {
        return (true, n);
    }
    let c = 4.0 * p * q;
    for _ in 0..2 {
        n += 2;
        if rng.gen::<f64>() < c {
            return (true, n);
        }
    }
    loop {
        n += 1;
        if rng.gen::<f64>() < q {
            return (false, n);
        }
        n += 1;
        if rng.gen::<f64>() < q {
            return (true, n);
        }
    }
}

/// 1 − ((1 − p)/(1 + p))(q − p)⁴
pub fn tx_prime_success(p: f64) -> f64 {
    let q = 1.0 - p;
    1.0 - (q / (1.0 + p)) * (q - p).powi(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::stats::{rate_matches, MeanEstimate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn t_chain_matches_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (p, p0) in [(0.5, 0.5), (0.75, 0.75), (0.25, 0.25)] {
            let xs: Vec<u64> = (0..100_000).map(|_| simulate_t_chain(p, p0, &mut rng)).collect();
            assert!(MeanEstimate::of_counts(&xs).matches(t_mean(p, p0)));
        }
        assert!((t_mean(0.5, 0.5) - 2.0).abs() < 1e-12);
        assert!((t_mean(0.75, 0.75) - 5.0 / 3.0).abs() < 1e-12);
        assert!((t_mean(0.25, 0.25) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_moment_by_summation() {
        // direct sum over the geometric number of attempts
        let (p, p0, g): (f64, f64, f64) = (0.3, 0.2, 1.2);
        let c = 4.0 * p * (1.0 - p);
        let mut s = p0 * g;
        for k in 1..2000 {
            s += (1.0 - p0) * ((1.0 - c) * g * g).powi(k - 1) * c * g.powi(3);
        }
        assert!((s - t_gamma_moment(p, p0, g)).abs() < 1e-9);
    }

    #[test]
    fn tx_prime_rates() {
        assert_eq!(tx_prime_success(0.5), 1.0);
        assert!((tx_prime_success(0.9) - 0.978442).abs() < 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let hits = (0..n).filter(|_| simulate_tx_prime_chain(0.9, &mut rng).0).count();
        assert!(rate_matches(hits, n, tx_prime_success(0.9)));
    }
}
