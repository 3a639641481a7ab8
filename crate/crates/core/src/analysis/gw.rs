//! The subdivision branching process: each active interval succeeds with
//! probability p_s, otherwise it spawns two active halves.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Node budget before a run is declared non-terminating.
pub const GW_NODE_CAP: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GwSample {
    /// |S∞|: every interval ever considered.
    pub size: u64,
    /// Intervals where the attempt succeeded.
    pub leaves: u64,
}

pub fn galton_watson_size<R: Rng + ?Sized>(p_s: f64, rng: &mut R) -> Result<GwSample> {
    if !(0.0..=1.0).contains(&p_s) {
        return Err(Error::InvalidParameter(format!("p_s must lie in [0, 1], got {p_s}")));
    }
    let mut active = 1u64;
    let mut size = 0u64;
    let mut leaves = 0u64;
    while active > 0 {
        active -= 1;
        size += 1;
        if size > GW_NODE_CAP {
            return Err(Error::NonTermination(GW_NODE_CAP));
        }
        if rng.gen::<f64>() < p_s {
            leaves += 1;
        } else {
            active += 2;
        }
    }
    Ok(GwSample { size, leaves })
}

fn supercritical(p_s: f64) -> Result<()> {
    if p_s <= 0.5 || p_s > 1.0 {
        return Err(Error::InvalidParameter(format!("closed forms need 1/2 < p_s ≤ 1, got {p_s}")));
    }
    Ok(())
}

/// p_s/(2p_s − 1), the expected number of successful intervals.
pub fn gw_mean(p_s: f64) -> Result<f64> {
    supercritical(p_s)?;
    Ok(p_s / (2.0 * p_s - 1.0))
}

/// 1/(2p_s − 1), the expected number of intervals considered.
pub fn gw_total_mean(p_s: f64) -> Result<f64> {
    supercritical(p_s)?;
    Ok(1.0 / (2.0 * p_s - 1.0))
}

/// 1/(2√(p_s(1 − p_s)))
pub fn gw_gamma_max(p_s: f64) -> Result<f64> {
    supercritical(p_s)?;
    if p_s == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (2.0 * (p_s * (1.0 - p_s)).sqrt()))
}

/// Exact ⟨Γ^{|S∞|}⟩, the root of x = Γ(p_s + (1 − p_s)x²) through x(1) = 1.
pub fn gw_gamma_moment(p_s: f64, gamma: f64) -> Result<f64> {
    supercritical(p_s)?;
    let q = 1.0 - p_s;
    if q == 0.0 {
        return Ok(gamma);
    }
    let disc = 1.0 - 4.0 * gamma * gamma * p_s * q;
    if disc < -1e-15 {
        return Err(Error::InvalidParameter(format!("Γ = {gamma} exceeds Γ_max")));
    }
    Ok((1.0 - disc.max(0.0).sqrt()) / (2.0 * q * gamma))
}

/// Γ^{1 + 2/(2p_s − 1)}
pub fn gw_gamma_bound(p_s: f64, gamma: f64) -> Result<f64> {
    supercritical(p_s)?;
    Ok(gamma.powf(1.0 + 2.0 / (2.0 * p_s - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::stats::MeanEstimate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn certain_success() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(galton_watson_size(1.0, &mut rng).unwrap(), GwSample { size: 1, leaves: 1 });
        }
    }

    #[test]
    fn means_match_recursions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = 0.8;
        let xs: Vec<GwSample> = (0..200_000).map(|_| galton_watson_size(p, &mut rng).unwrap()).collect();
        let size = MeanEstimate::of_counts(&xs.iter().map(|x| x.size).collect::<Vec<_>>());
        let leaves = MeanEstimate::of_counts(&xs.iter().map(|x| x.leaves).collect::<Vec<_>>());
        assert!(size.matches(gw_total_mean(p).unwrap()), "{size:?}");
        assert!(leaves.matches(gw_mean(p).unwrap()), "{leaves:?}");
        // a full binary tree has one more leaf than internal node
        assert!(xs.iter().all(|x| x.size == 2 * x.leaves - 1));
    }

    #[test]
    fn gamma_moment_closed_form() {
        let p = 0.9;
        let gmax = gw_gamma_max(p).unwrap();
        assert!((gw_gamma_moment(p, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((gw_gamma_moment(p, gmax).unwrap() - 2.0 * p * gmax).abs() < 1e-6);
        for g in [1.0, 1.2, 1.5, gmax] {
            assert!(gw_gamma_moment(p, g).unwrap() <= gw_gamma_bound(p, g).unwrap() + 1e-12);
        }
        // fixed point
        let g = 1.3;
        let x = gw_gamma_moment(p, g).unwrap();
        assert!((x - g * (p + (1.0 - p) * x * x)).abs() < 1e-12);
        assert!(gw_mean(0.5).is_err());
    }
}
