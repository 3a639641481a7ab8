use num_complex::Complex64;
use rand::Rng;

use super::{AttemptOutcome, Flag};
use crate::error::{Error, Result};
use crate::oracles::{ov, Reflection, Session};
use crate::quantum::StateVector;

/// Attempts allowed before a chain is declared non-terminating.
pub const MAX_CHAIN_STEPS: u64 = 10_000_000;

/// √(3/4)|0⟩ + √(1/4)|1⟩
pub fn suppression_ancilla() -> [Complex64; 2] {
    [Complex64::new(0.75f64.sqrt(), 0.0), Complex64::new(0.5, 0.0)]
}

fn ancilla_zero() -> [Complex64; 2] {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
}

/// OV threshold separating p < 1/3 from p > 1/2.
pub fn tx_alpha() -> f64 {
    ((1.0f64 / 3.0).sqrt().acos() + std::f64::consts::FRAC_PI_4) / 2.0
}

pub fn tx_resolution() -> f64 {
    ((1.0f64 / 3.0).sqrt().acos() - std::f64::consts::FRAC_PI_4) / 2.0
}

/// Distance of `x` from span{ψ, φ} for rank-one reflections.
pub fn span_residual(r_psi: &Reflection, r_phi: &Reflection, x: &StateVector) -> Result<f64> {
    let (psi, phi) = match (r_psi.axis(), r_phi.axis()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(0.0),
    };
    x.check_dim(&psi)?;
    let mut resid = x.amplitudes() - psi.amplitudes() * psi.inner(x)?;
    let perp = phi.amplitudes() - psi.amplitudes() * psi.inner(&phi)?;
    let n = perp.norm();
    if n > 1e-12 {
        let e = perp / Complex64::new(n, 0.0);
        let c = e.dotc(&resid);
        resid -= e * c;
    }
    Ok(resid.norm())
}

fn require_span(r_psi: &Reflection, r_phi: &Reflection, x: &StateVector) -> Result<()> {
    let residual = span_residual(r_psi, r_phi, x)?;
    if residual > 1e-9 {
        return Err(Error::OutsideSpan { residual });
    }
    Ok(())
}

/// RT(ψ, φ): reflect about ψ, then measure φ. Two reflections.
pub fn rt_attempt<R: Rng>(
    s: &mut Session<R>,
    r_psi: &Reflection,
    r_phi: &Reflection,
    state: &StateVector,
) -> Result<(bool, StateVector)> {
    require_span(r_psi, r_phi, state)?;
    let x = s.apply_reflection(r_psi, state)?;
    s.measure_reflection(r_phi, &x)
}

fn run_t<R: Rng>(s: &mut Session<R>, r_psi: &Reflection, r_phi: &Reflection, start: &StateVector) -> Result<StateVector> {
    let (mut hit, mut x) = s.measure_reflection(r_phi, start)?;
    let mut steps = 0;
    while !hit {
        steps += 1;
        if steps > MAX_CHAIN_STEPS {
            return Err(Error::NonTermination(MAX_CHAIN_STEPS));
        }
        let y = s.apply_reflection(r_psi, &x)?;
        (hit, x) = s.measure_reflection(r_phi, &y)?;
    }
    Ok(x)
}

/// T(ψ, φ) from ψ′ in span{ψ, φ}: a φ-measurement, then RT until φ is seen.
pub fn transform_t<R: Rng>(
    s: &mut Session<R>,
    r_psi: &Reflection,
    r_phi: &Reflection,
    start: &StateVector,
) -> Result<AttemptOutcome> {
    require_span(r_psi, r_phi, start)?;
    let before = s.ledger.reflections;
    let state = run_t(s, r_psi, r_phi, start)?;
    Ok(AttemptOutcome { success: true, reflections: s.ledger.reflections - before, state, reported_phase: None, flag: None })
}

/// T_m: T on the ancilla-extended pair, overlap 3p/4, ancilla discarded.
pub fn transform_tm<R: Rng>(
    s: &mut Session<R>,
    r_psi: &Reflection,
    r_phi: &Reflection,
    psi: &StateVector,
) -> Result<AttemptOutcome> {
    let a = suppression_ancilla();
    let e0 = ancilla_zero();
    let out = transform_t(s, &r_psi.extended(a), &r_phi.extended(e0), &psi.tensor_ancilla(a))?;
    Ok(AttemptOutcome { state: out.state.strip_ancilla(e0)?, ..out })
}

/// T_x: one overlap-oracle call and a ψ-measurement decide whether to run T_m.
pub fn transform_tx<R: Rng>(
    s: &mut Session<R>,
    r_psi: &Reflection,
    r_phi: &Reflection,
    psi: &StateVector,
) -> Result<AttemptOutcome> {
    let before = s.ledger.reflections;
    let (b, x) = ov(s, r_psi, r_phi, tx_alpha(), tx_resolution(), psi)?;
    let (seen_psi, x) = s.measure_reflection(r_psi, &x)?;
    let state = if !seen_psi {
        // ψ⊥ lies in span{ψ, φ}, so T applies directly
        Some(run_t(s, r_psi, r_phi, &x)?)
    } else if b {
        Some(transform_tm(s, r_psi, r_phi, &x)?.state)
    } else {
        None
    };
    let reflections = s.ledger.reflections - before;
    Ok(match state {
        Some(state) => AttemptOutcome { success: true, reflections, state, reported_phase: None, flag: Some(Flag::One) },
        None => AttemptOutcome { success: false, reflections, state: x, reported_phase: None, flag: Some(Flag::Zero) },
    })
}

/// T'_x: a φ-measurement, at most two RT, then alternating ψ/φ measurements.
pub fn transform_tx_prime<R: Rng>(
    s: &mut Session<R>,
    r_psi: &Reflection,
    r_phi: &Reflection,
    psi: &StateVector,
) -> Result<AttemptOutcome> {
    require_span(r_psi, r_phi, psi)?;
    let before = s.ledger.reflections;
    let (mut hit, mut x) = s.measure_reflection(r_phi, psi)?;
    for _ in 0..2 {
        if hit {
            break;
        }
        let y = s.apply_reflection(r_psi, &x)?;
        (hit, x) = s.measure_reflection(r_phi, &y)?;
    }
    let mut steps = 0;
    while !hit {
        steps += 1;
        if steps > MAX_CHAIN_STEPS {
            return Err(Error::NonTermination(MAX_CHAIN_STEPS));
        }
        let (seen_psi, y) = s.measure_reflection(r_psi, &x)?;
        if seen_psi {
            return Ok(AttemptOutcome {
                success: false,
                reflections: s.ledger.reflections - before,
                state: y,
                reported_phase: None,
                flag: Some(Flag::Zero),
            });
        }
        (hit, x) = s.measure_reflection(r_phi, &y)?;
    }
    Ok(AttemptOutcome { success: true, reflections: s.ledger.reflections - before, state: x, reported_phase: None, flag: Some(Flag::One) })
}

/// T'_mx: T'_x on the ancilla-extended pair. Failure leaves ψ.
pub fn transform_tmx_prime<R: Rng>(
    s: &mut Session<R>,
    r_psi: &Reflection,
    r_phi: &Reflection,
    psi: &StateVector,
) -> Result<AttemptOutcome> {
    let a = suppression_ancilla();
    let e0 = ancilla_zero();
    let out = transform_tx_prime(s, &r_psi.extended(a), &r_phi.extended(e0), &psi.tensor_ancilla(a))?;
    let state = if out.success { out.state.strip_ancilla(e0)? } else { out.state.strip_ancilla(a)? };
    Ok(AttemptOutcome { state, ..out })
}
