use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::{Reflection, Session};
use crate::error::{Error, Result};
use crate::quantum::{phase_diff, wrap_phase, SpectralOperator, StateVector};

/// Outcome of a forward phase-estimation call; keeps what the reversal needs.
#[derive(Clone, Debug)]
pub struct PhaseEstimate {
    pub estimate: f64,
    /// Eigenvector indices of the eigenspace the state collapsed onto.
    pub eigenspace: Vec<usize>,
    pub state: StateVector,
    delta: f64,
}

fn check_resolution(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("resolution must be positive, got {delta}")));
    }
    Ok(())
}

fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Fraction of [o−h, o+h] inside [−w, w].
fn window_fraction(o: f64, h: f64, w: f64) -> f64 {
    let lo = (o - h).max(-w);
    let hi = (o + h).min(w);
    ((hi - lo).max(0.0) / (2.0 * h)).min(1.0)
}

/// Coherent post-measurement state: component k scaled by √P(bit | k).
fn weighted_state(
    vectors: &DMatrix<Complex64>,
    coeff: &DVector<Complex64>,
    groups: &[Vec<usize>],
    p_bit: &[f64],
) -> Result<StateVector> {
    let mut v = DVector::<Complex64>::zeros(vectors.nrows());
    for (g, &p) in groups.iter().zip(p_bit) {
        let a = Complex64::new(p.max(0.0).sqrt(), 0.0);
        for &k in g {
            v += vectors.column(k) * (coeff[k] * a);
        }
    }
    if v.norm() < 1e-12 {
        return Err(Error::ZeroNormBranch);
    }
    StateVector::new(v)
}

/// PE(U, δ): Born-rule collapse onto an eigenspace and an estimate uniform within ±δ.
pub fn pe<R: Rng>(s: &mut Session<R>, u: &SpectralOperator, delta: f64, state: &StateVector) -> Result<PhaseEstimate> {
    check_resolution(delta)?;
    let coeff = u.coefficients(state)?;
    let groups = u.eigenspaces();
    let weights: Vec<f64> = groups.iter().map(|g| g.iter().map(|&k| coeff[k].norm_sqr()).sum()).collect();
    let g = sample_index(&weights, &mut s.rng);
    let mut v = DVector::<Complex64>::zeros(u.dim());
    for &k in &groups[g] {
        v += u.eigenvectors().column(k) * coeff[k];
    }
    let post = StateVector::new(v)?;
    let phase = u.phases()[groups[g][0]];
    let estimate = if s.corrupted() {
        s.rng.gen::<f64>() * TAU
    } else {
        wrap_phase(phase + delta * (2.0 * s.rng.gen::<f64>() - 1.0))
    };
    s.ledger.pe_calls += 1;
    s.ledger.unitary_applications += s.cost(delta);
    Ok(PhaseEstimate { estimate, eigenspace: groups[g].clone(), state: post, delta })
}

/// Uncomputes the estimate register; charged like the forward call.
pub fn pe_reverse<R: Rng>(s: &mut Session<R>, est: PhaseEstimate) -> StateVector {
    s.ledger.pe_reversals += 1;
    s.ledger.unitary_applications += s.cost(est.delta);
    est.state
}

/// PD(U, φ0, δ) from PE(U, δ/4), a threshold at δ/2 and reversal.
pub fn pd<R: Rng>(
    s: &mut Session<R>,
    u: &SpectralOperator,
    phi0: f64,
    delta: f64,
    state: &StateVector,
) -> Result<(bool, StateVector)> {
    check_resolution(delta)?;
    let coeff = u.coefficients(state)?;
    let groups = u.eigenspaces();
    let q = s.noise_probability();
    let flat = (delta / TAU).min(1.0);
    let p1: Vec<f64> = groups
        .iter()
        .map(|g| {
            let o = phase_diff(u.phases()[g[0]], phi0);
            (1.0 - q) * window_fraction(o, delta / 4.0, delta / 2.0) + q * flat
        })
        .collect();
    let weights: Vec<f64> = groups.iter().map(|g| g.iter().map(|&k| coeff[k].norm_sqr()).sum()).collect();
    let prob1: f64 = weights.iter().zip(&p1).map(|(w, p)| w * p).sum();
    let bit = s.rng.gen::<f64>() < prob1;
    let p_bit: Vec<f64> = p1.iter().map(|&p| if bit { p } else { 1.0 - p }).collect();
    let post = weighted_state(u.eigenvectors(), &coeff, &groups, &p_bit)?;
    s.ledger.pd_calls += 1;
    s.ledger.unitary_applications += s.cost(delta);
    Ok((bit, post))
}

/// R(U, φ0, δ) with the nearest-threshold rule in the indeterminate band.
pub fn reflect<R: Rng>(
    s: &mut Session<R>,
    u: &SpectralOperator,
    phi0: f64,
    delta: f64,
    state: &StateVector,
) -> Result<StateVector> {
    check_resolution(delta)?;
    s.apply_reflection(&Reflection::oracle(u, phi0, delta), state)
}

/// OV(ψ, φ, α, δ): phase estimation of R_ψR_φ at resolution 2δ on span{ψ, φ},
/// bit 1 iff the estimate lies in [−2α, 2α].
pub fn ov<R: Rng>(
    s: &mut Session<R>,
    r_psi: &Reflection,
    r_phi: &Reflection,
    alpha: f64,
    delta: f64,
    state: &StateVector,
) -> Result<(bool, StateVector)> {
    check_resolution(delta)?;
    let (psi, phi) = match (r_psi.axis(), r_phi.axis()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidParameter("overlap oracle needs rank-one reflections".into())),
    };
    state.check_dim(&psi)?;
    let mut basis = vec![psi.clone()];
    let ov_ = psi.inner(&phi)?;
    let perp = phi.amplitudes() - psi.amplitudes() * ov_;
    if perp.norm() > 1e-12 {
        basis.push(StateVector::new(perp)?);
    }
    let coords: Vec<Complex64> = basis.iter().map(|e| e.inner(state).unwrap()).collect();
    let mut resid = state.amplitudes().clone();
    for (e, c) in basis.iter().zip(&coords) {
        resid -= e.amplitudes() * *c;
    }
    if resid.norm() > 1e-10 {
        return Err(Error::OutsideSpan { residual: resid.norm() });
    }
    let q = s.noise_probability();
    let flat = (2.0 * alpha / std::f64::consts::PI).min(1.0);
    let n = basis.len();
    // W = R_ψ R_φ restricted to the span; a 1-dimensional span is fixed by W
    let (phases, vecs) = if n == 1 {
        (vec![0.0], DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)))
    } else {
        let mut w = DMatrix::<Complex64>::zeros(2, 2);
        for j in 0..2 {
            let img = r_psi.apply(&r_phi.apply(&basis[j])?)?;
            for i in 0..2 {
                w[(i, j)] = basis[i].inner(&img)?;
            }
        }
        let op = SpectralOperator::from_unitary(&w)?;
        (op.phases().to_vec(), op.eigenvectors().clone())
    };
    let x = DVector::from_vec(coords);
    let c = vecs.adjoint() * &x;
    let p1: Vec<f64> = phases
        .iter()
        .map(|&ph| (1.0 - q) * window_fraction(phase_diff(ph, 0.0), 2.0 * delta, 2.0 * alpha) + q * flat)
        .collect();
    let prob1: f64 = c.iter().zip(&p1).map(|(a, p)| a.norm_sqr() * p).sum();
    let bit = s.rng.gen::<f64>() < prob1;
    let mut y = DVector::<Complex64>::zeros(n);
    for k in 0..n {
        let p = if bit { p1[k] } else { 1.0 - p1[k] };
        y += vecs.column(k) * (c[k] * p.max(0.0).sqrt());
    }
    let mut out = DVector::<Complex64>::zeros(state.dim());
    for (e, yi) in basis.iter().zip(y.iter()) {
        out += e.amplitudes() * *yi;
    }
    if out.norm() < 1e-12 {
        return Err(Error::ZeroNormBranch);
    }
    s.ledger.ov_calls += 1;
    s.ledger.unitary_applications += s.cost(delta);
    Ok((bit, StateVector::new(out)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{oracle_cost, OracleConfig};
    use crate::quantum::{overlap_probability, reflection_about};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn diag_op(phases: &[f64]) -> SpectralOperator {
        let d = phases.len();
        SpectralOperator::from_spectrum(phases.to_vec(), DMatrix::identity(d, d)).unwrap()
    }

    fn session(seed: u64) -> Session {
        Session::seeded(OracleConfig::default(), seed, 0)
    }

    #[test]
    fn pe_on_eigenstate() {
        let u = diag_op(&[0.3, 2.0]);
        let mut s = session(1);
        let e0 = StateVector::basis(2, 0).unwrap();
        for _ in 0..1000 {
            let est = pe(&mut s, &u, 0.1, &e0).unwrap();
            assert!(phase_diff(est.estimate, 0.3).abs() <= 0.1 + 1e-12);
            assert_abs_diff_eq!(overlap_probability(&est.state, &e0).unwrap(), 1.0, epsilon = 1e-12);
            let back = pe_reverse(&mut s, est);
            assert_eq!(back, e0);
        }
        assert_eq!(s.ledger.pe_calls, 1000);
        assert_eq!(s.ledger.pe_reversals, 1000);
        assert_eq!(s.ledger.unitary_applications, 2000 * s.cost(0.1));
    }

    #[test]
    fn pe_collapse_frequencies() {
        let u = diag_op(&[0.3, 2.0]);
        let mut s = session(2);
        let plus = StateVector::from_real(&[1.0, 1.0]).unwrap();
        let n = 100_000;
        let hits = (0..n).filter(|_| pe(&mut s, &u, 0.1, &plus).unwrap().eigenspace == vec![0]).count();
        let f = hits as f64 / n as f64;
        assert!((f - 0.5).abs() <= 3.0 * (0.25 / n as f64).sqrt(), "{f}");
    }

    #[test]
    fn pd_examples() {
        let delta = 0.4;
        let u = diag_op(&[1.0, 1.0 + PI, 1.0 + delta / 2.0]);
        let mut s = session(3);
        for _ in 0..200 {
            let e0 = StateVector::basis(3, 0).unwrap();
            assert_eq!(pd(&mut s, &u, 1.0, delta, &e0).unwrap(), (true, e0.clone()));
            let e1 = StateVector::basis(3, 1).unwrap();
            assert_eq!(pd(&mut s, &u, 1.0, delta, &e1).unwrap(), (false, e1.clone()));
            let e2 = StateVector::basis(3, 2).unwrap();
            let (_, post) = pd(&mut s, &u, 1.0, delta, &e2).unwrap();
            assert_abs_diff_eq!(overlap_probability(&post, &e2).unwrap(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(s.ledger.unitary_applications, 600 * oracle_cost(delta, 0.01, s.config.cost_constant));
    }

    #[test]
    fn pd_band_bit_is_mixed() {
        let delta = 0.4;
        let u = diag_op(&[1.0 + delta / 2.0, 3.0]);
        let mut s = session(4);
        let e0 = StateVector::basis(2, 0).unwrap();
        let ones = (0..2000).filter(|_| pd(&mut s, &u, 1.0, delta, &e0).unwrap().0).count();
        assert!(ones > 800 && ones < 1200, "{ones}");
    }

    #[test]
    fn reflect_examples() {
        let delta = 0.4;
        let u = diag_op(&[1.0, 1.0 + 0.75 * delta, 1.0 + 0.45 * delta, 1.0 + 0.55 * delta]);
        let mut s = session(5);
        let x = StateVector::from_real(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = reflect(&mut s, &u, 1.0, delta, &x).unwrap();
        let a = y.amplitudes();
        assert_abs_diff_eq!(a[0].re, -x.amplitudes()[0].re, epsilon = 1e-12);
        assert_abs_diff_eq!(a[1].re, x.amplitudes()[1].re, epsilon = 1e-12);
        assert_abs_diff_eq!(a[2].re, -x.amplitudes()[2].re, epsilon = 1e-12);
        assert_abs_diff_eq!(a[3].re, x.amplitudes()[3].re, epsilon = 1e-12);
        let z = reflect(&mut s, &u, 1.0, delta, &y).unwrap();
        assert_abs_diff_eq!(overlap_probability(&z, &x).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x.inner(&z).unwrap().re, 1.0, epsilon = 1e-12);
        assert_eq!(s.ledger.reflections, 2);
    }

    #[test]
    fn ov_examples() {
        let mut s = session(6);
        let psi = StateVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        let rp = Reflection::about(&psi);
        assert_eq!(ov(&mut s, &rp, &rp, FRAC_PI_4, 0.1, &psi).unwrap(), (true, psi.clone()));
        let phi = StateVector::basis(3, 1).unwrap();
        let rf = Reflection::about(&phi);
        let (b, post) = ov(&mut s, &rp, &rf, FRAC_PI_4, 0.1, &psi).unwrap();
        assert!(!b);
        assert_abs_diff_eq!(overlap_probability(&post, &psi).unwrap(), 1.0, epsilon = 1e-12);
        let off = StateVector::basis(3, 2).unwrap();
        assert!(matches!(ov(&mut s, &rp, &rf, FRAC_PI_4, 0.1, &off), Err(Error::OutsideSpan { .. })));
    }

    #[test]
    fn ov_out_of_band_is_exact_and_band_stays_in_span() {
        let mut s = session(7);
        let alpha: f64 = 0.6;
        let psi = StateVector::basis(3, 0).unwrap();
        let rp = Reflection::about(&psi);
        for (theta, want) in [(0.3f64, Some(true)), (0.9, Some(false)), (alpha, None)] {
            let phi = StateVector::from_real(&[theta.cos(), theta.sin(), 0.0]).unwrap();
            let rf = Reflection::about(&phi);
            for _ in 0..10_000 {
                let (b, post) = ov(&mut s, &rp, &rf, alpha, 0.1, &psi).unwrap();
                if let Some(w) = want {
                    assert_eq!(b, w);
                    assert_abs_diff_eq!(overlap_probability(&post, &psi).unwrap(), 1.0, epsilon = 1e-10);
                }
                assert!(post.amplitudes()[2].norm() < 1e-10);
            }
        }
    }

    #[test]
    fn eigenvectors_are_preserved_by_every_oracle() {
        let h = DMatrix::from_fn(4, 4, |i, j| Complex64::new(((i * 3 + j * 5) % 7) as f64 + if i == j { i as f64 } else { 0.0 }, 0.0));
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let u = SpectralOperator::from_hermitian(&h).unwrap();
        let mut s = session(8);
        for k in 0..4 {
            let v = u.eigenvector(k);
            let phi0 = u.phases()[0];
            let e = pe(&mut s, &u, 0.05, &v).unwrap();
            assert!(overlap_probability(&e.state, &v).unwrap() >= 1.0 - 1e-10);
            let (_, p) = pd(&mut s, &u, phi0, 0.05, &v).unwrap();
            assert!(overlap_probability(&p, &v).unwrap() >= 1.0 - 1e-10);
            let r = reflect(&mut s, &u, phi0, 0.05, &v).unwrap();
            assert!(overlap_probability(&r, &v).unwrap() >= 1.0 - 1e-10);
        }
        // the same holds for the product of reflections used by OV
        let a = StateVector::from_real(&[1.0, 0.2, 0.0, 0.0]).unwrap();
        let b = StateVector::from_real(&[0.3, 1.0, 0.0, 0.0]).unwrap();
        let w = reflection_about(&a).matrix() * reflection_about(&b).matrix();
        let wop = SpectralOperator::from_unitary(&w).unwrap();
        for k in 0..4 {
            let v = wop.eigenvector(k);
            if v.amplitudes()[2].norm() + v.amplitudes()[3].norm() > 1e-9 {
                continue;
            }
            let (_, p) = ov(&mut s, &Reflection::about(&a), &Reflection::about(&b), 0.4, 0.1, &v).unwrap();
            assert!(overlap_probability(&p, &v).unwrap() >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn noisy_errors_are_subadditive() {
        let eps = 0.05;
        let k = 5;
        let trials = 10_000;
        let u = diag_op(&[0.0, PI]);
        let x = StateVector::from_real(&[0.8, 0.6]).unwrap();
        let mut ideal = x.clone();
        let mut si = session(9);
        for _ in 0..k {
            ideal = reflect(&mut si, &u, 0.0, 0.5, &ideal).unwrap();
        }
        let mut sn = Session::seeded(OracleConfig::noisy(eps), 9, 1);
        let mut bad = 0;
        for _ in 0..trials {
            let mut y = x.clone();
            for _ in 0..k {
                y = reflect(&mut sn, &u, 0.0, 0.5, &y).unwrap();
            }
            if (y.amplitudes() - ideal.amplitudes()).norm() > 1e-9 {
                bad += 1;
            }
        }
        let f = bad as f64 / trials as f64;
        let sigma = (f * (1.0 - f) / trials as f64).sqrt();
        assert!(bad > 0);
        // error amplitude is the square root of the corrupted-run probability; delta-method σ
        let amp_sigma = sigma / (2.0 * f.sqrt());
        assert!(f.sqrt() <= k as f64 * eps + 3.0 * amp_sigma, "{f}");
    }
}
