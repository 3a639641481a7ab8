use std::f64::consts::TAU;

use crate::error::Result;
use crate::quantum::{phase_distance, wrap_phase, SpectralOperator, StateVector};

/// (γ, δ)-dominance of the target phase: every window of width 2δ holding
/// weight above γ contains the target. Exact over contiguous runs of phases.
pub fn dominance_holds(phases: &[f64], weights: &[f64], target: f64, gamma: f64, delta: f64) -> bool {
    let mut keyed: Vec<(f64, f64)> = phases
        .iter()
        .zip(weights)
        .filter(|(&ph, _)| phase_distance(ph, target) > 1e-12)
        .map(|(&ph, &w)| {
            let k = wrap_phase(ph - target);
            (if k <= 0.0 { k + TAU } else { k }, w)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut lo = 0;
    let mut sum = 0.0;
    for hi in 0..keyed.len() {
        sum += keyed[hi].1;
        while keyed[hi].0 - keyed[lo].0 > 2.0 * delta {
            sum -= keyed[lo].1;
            lo += 1;
        }
        if sum > gamma {
            return false;
        }
    }
    true
}

/// Dominance of eigenvector `target` of `u` in `psi`.
pub fn check_dominance(u: &SpectralOperator, target: usize, psi: &StateVector, gamma: f64, delta: f64) -> Result<bool> {
    let w = u.weights(psi)?;
    Ok(dominance_holds(u.phases(), &w, u.phases()[target], gamma, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(phases: &[f64], weights: &[f64], target: f64, gamma: f64, delta: f64) -> bool {
        let n = 20_000;
        (0..n).all(|i| {
            let c = TAU * i as f64 / n as f64;
            if phase_distance(c, target) <= delta {
                return true;
            }
            let w: f64 = phases.iter().zip(weights).filter(|(&p, _)| phase_distance(p, c) <= delta).map(|(_, &w)| w).sum();
            w <= gamma
        })
    }

    #[test]
    fn simple_cases() {
        assert!(dominance_holds(&[0.0, 1.0, 2.0], &[0.6, 0.2, 0.2], 0.0, 0.3, 0.1));
        assert!(!dominance_holds(&[0.0, 1.0, 1.1], &[0.6, 0.2, 0.2], 0.0, 0.3, 0.1));
        assert!(dominance_holds(&[0.0, 1.0, 1.1], &[0.6, 0.2, 0.2], 0.0, 0.3, 0.04));
        // wraps through 2π
        assert!(!dominance_holds(&[3.0, 6.25, 0.02], &[0.6, 0.2, 0.2], 3.0, 0.3, 0.1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_window_scan(raw in prop::collection::vec((0.0..TAU, 0.01f64..1.0), 2..7), gamma in 0.05f64..0.5, delta in 0.05f64..0.6) {
            let total: f64 = raw.iter().map(|r| r.1).sum();
            let phases: Vec<f64> = raw.iter().map(|r| r.0).collect();
            let weights: Vec<f64> = raw.iter().map(|r| r.1 / total).collect();
            // skip configurations within grid resolution of a boundary
            let margin = TAU / 20_000.0 * 2.0;
            let close = phases.iter().enumerate().any(|(i, &a)| phases.iter().skip(i + 1).any(|&b| (phase_distance(a, b) - 2.0 * delta).abs() < margin || (phase_distance(a, b) - delta).abs() < margin));
            prop_assume!(!close);
            prop_assert_eq!(dominance_holds(&phases, &weights, phases[0], gamma, delta), brute(&phases, &weights, phases[0], gamma, delta));
        }
    }
}
