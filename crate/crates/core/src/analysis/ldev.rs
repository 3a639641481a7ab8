//! Γ-moment (large-deviation) bookkeeping: ⟨Γ^C⟩ ≤ Γ^{C̃} checked on samples
//! in log space.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::chains::{simulate_tx_prime_chain, tx_prime_success};
use super::gw::gw_gamma_max;
use super::stats::SIGMA_SLACK;
use crate::error::{Error, Result};

/// log⟨Γ^C⟩ over the samples and the relative standard error of ⟨Γ^C⟩.
pub fn log_gamma_moment(samples: &[f64], gamma: f64) -> (f64, f64) {
    let lg = gamma.ln();
    let n = samples.len() as f64;
    let top = samples.iter().map(|&c| c * lg).fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = samples.iter().map(|&c| (c * lg - top).exp()).collect();
    let mean = w.iter().sum::<f64>() / n;
    let var = if samples.len() > 1 { w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (top + mean.ln(), (var / n).sqrt() / mean)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub gamma: f64,
    pub exponent: f64,
    pub log_moment: f64,
    pub log_bound: f64,
    pub rel_se: f64,
    pub pass: bool,
}

/// ⟨Γ^C⟩ ≤ Γ^{C̃}(1 + 3σ), σ the relative standard error.
pub fn moment_check(samples: &[f64], gamma: f64, exponent: f64) -> MomentCheck {
    let (log_moment, rel_se) = log_gamma_moment(samples, gamma);
    let log_bound = exponent * gamma.ln();
    let pass = log_moment <= log_bound + (1.0 + SIGMA_SLACK * rel_se).ln() + 1e-12;
    MomentCheck { gamma, exponent, log_moment, log_bound, rel_se, pass }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdevReport {
    pub checks: Vec<MomentCheck>,
    pub pass: bool,
}

/// Composition: totals of sequential procedures against Γ^{ΣC̃_i} at each Γ.
pub fn verify_ldev_composition(per_step: &[f64], totals: &[f64], gammas: &[f64]) -> LdevReport {
    let exponent: f64 = per_step.iter().sum();
    let checks: Vec<MomentCheck> = gammas.iter().map(|&g| moment_check(totals, g, exponent)).collect();
    let pass = checks.iter().all(|c| c.pass);
    LdevReport { checks, pass }
}

/// Success-gated sequence driven by interval subdivision: every attempt is a
/// T'_x chain whose success probability equals p_s; failures spawn two more.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomCountReport {
    pub p_s: f64,
    /// Overlap at which T'_x succeeds with probability p_s.
    pub overlap: f64,
    pub m_tilde: f64,
    pub c_tilde: f64,
    pub gamma_limit: f64,
    pub mean_m: f64,
    pub zero_cost_invocations: u64,
    pub checks: Vec<MomentCheck>,
    pub count_checks: Vec<MomentCheck>,
    pub pass: bool,
}

/// Per-attempt exponent of T'_x: ⟨Γ^n | A⟩ ≤ Γ^11 for Γ ≤ 8/7.
pub const TX_PRIME_EXPONENT: f64 = 11.0;
pub const TX_PRIME_GAMMA_MAX: f64 = 8.0 / 7.0;

/// One success-gated sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomCountSample {
    pub cost: u64,
    /// Invocations with positive cost.
    pub m: u64,
    /// Zero-cost invocations, excluded from m.
    pub idle: u64,
}

/// Runs T'_x attempts at `overlap` over a subdivision tree until every branch succeeds.
pub fn random_count_sample<R: Rng + ?Sized>(overlap: f64, idle_prob: f64, rng: &mut R) -> Result<RandomCountSample> {
    let (mut active, mut m, mut cost, mut idle) = (1u64, 0u64, 0u64, 0u64);
    while active > 0 {
        active -= 1;
        if rng.gen::<f64>() < idle_prob {
            idle += 1;
        }
        let (ok, n) = simulate_tx_prime_chain(overlap, rng);
        cost += n;
        m += 1;
        if !ok {
            active += 2;
        }
        if m > super::gw::GW_NODE_CAP {
            return Err(Error::NonTermination(m));
        }
    }
    Ok(RandomCountSample { cost, m, idle })
}

/// (m̃, admissible Γ limit) for subdivision driven by success probability p_s.
pub fn random_count_exponents(p_s: f64) -> Result<(f64, f64)> {
    let (m_tilde, lambda_max) =
        if p_s >= 1.0 { (1.0, f64::INFINITY) } else { (1.0 + 2.0 / (2.0 * p_s - 1.0), gw_gamma_max(p_s)?) };
    Ok((m_tilde, lambda_max.powf(1.0 / TX_PRIME_EXPONENT).min(TX_PRIME_GAMMA_MAX)))
}

/// Overlap at which T'_x succeeds with probability p_s.
pub fn overlap_for_success(p_s: f64) -> f64 {
    // tx_prime_success increases from 0 to 1 on [0, 1/2]
    let (mut lo, mut hi) = (0.0, 0.5);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if tx_prime_success(mid) < p_s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `idle_prob` interleaves zero-cost invocations that must not enter m.
pub fn verify_ldev_random_count<R: Rng + ?Sized>(
    p_s: f64,
    trials: usize,
    gammas: &[f64],
    idle_prob: f64,
    rng: &mut R,
) -> Result<RandomCountReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let overlap = overlap_for_success(p_s);
    let (m_tilde, gamma_limit) = random_count_exponents(p_s)?;
    let c_tilde = TX_PRIME_EXPONENT;
    let mut totals = Vec::with_capacity(trials);
    let mut counts = Vec::with_capacity(trials);
    let mut idle = 0u64;
    for _ in 0..trials {
        let x = random_count_sample(overlap, idle_prob, rng)?;
        idle += x.idle;
        totals.push(x.cost as f64);
        counts.push(x.m as f64);
    }
    let mut checks = Vec::new();
    let mut count_checks = Vec::new();
    for &g in gammas {
        if g > gamma_limit + 1e-12 {
            return Err(Error::InvalidParameter(format!("Γ = {g} exceeds the admissible {gamma_limit}")));
        }
        checks.push(moment_check(&totals, g, m_tilde * c_tilde));
        count_checks.push(moment_check(&counts, g.powf(c_tilde), m_tilde));
    }
    let pass = checks.iter().chain(&count_checks).all(|c| c.pass);
    let mean_m = counts.iter().sum::<f64>() / trials as f64;
    Ok(RandomCountReport {
        p_s,
        overlap,
        m_tilde,
        c_tilde,
        gamma_limit,
        mean_m,
        zero_cost_invocations: idle,
        checks,
        count_checks,
        pass,
    })
}
