//! Eigenvector perturbation: angle bound arcsin(‖(S − δ)ψ‖/Δ) and the rate
//! bound ‖dH/ds‖/Δ, with finite-difference counterparts.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::quantum::{EigenPath, StateVector};

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// arcsin(‖(S − δ)ψ‖/Δ), clamped to π/2.
pub fn eig_angle_bound(s: &DMatrix<Complex64>, psi: &StateVector, shift: f64, gap: f64) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(Error::InvalidParameter(format!("gap must be positive, got {gap}")));
    }
    let v = s * psi.amplitudes() - psi.amplitudes() * Complex64::new(shift, 0.0);
    Ok((v.norm() / gap).min(1.0).asin())
}

/// Largest angle from ψ to the span of the orthonormal columns of `basis`.
pub fn angle_to_subspace(psi: &StateVector, basis: &DMatrix<Complex64>) -> f64 {
    let proj = (basis.adjoint() * psi.amplitudes()).norm();
    proj.min(1.0).acos()
}

/// Operator norm (largest singular value).
pub fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// ‖dH/ds‖/Δ at t with central differences.
pub fn rate_bound(h: impl Fn(f64) -> DMatrix<Complex64>, t: f64, gap: f64) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(Error::InvalidParameter(format!("gap must be positive, got {gap}")));
    }
    let d = (h(t + FD_STEP) - h(t - FD_STEP)) / Complex64::new(2.0 * FD_STEP, 0.0);
    Ok(operator_norm(&d) / gap)
}

/// ‖(1 − |ψ_t⟩⟨ψ_t|) dψ/ds‖ at t with central differences and phase alignment.
pub fn projected_rate<P: EigenPath + ?Sized>(path: &P, t: f64) -> Result<f64> {
    let mid = path.state(t)?.canonical();
    let a = path.state((t - FD_STEP).max(0.0))?.aligned_to(&mid);
    let b = path.state((t + FD_STEP).min(1.0))?.aligned_to(&mid);
    let h = (t + FD_STEP).min(1.0) - (t - FD_STEP).max(0.0);
    let d = (b.amplitudes() - a.amplitudes()) / Complex64::new(h, 0.0);
    let along = mid.amplitudes().dotc(&d);
    Ok((d - mid.amplitudes() * along).norm())
}

/// Random Hermitian matrix with entries of size `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R, scale: f64) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    (&a + a.adjoint()) * Complex64::new(scale, 0.0)
}

/// Random (H, S) pair: (exact angle between the `level`-th eigenvectors of H and
/// H + S, angle bound) with the shift and gap taken from H + S.
pub fn random_angle_instance<R: Rng + ?Sized>(d: usize, level: usize, scale: f64, rng: &mut R) -> Result<(f64, f64)> {
    if level >= d {
        return Err(Error::InvalidParameter(format!("level {level} out of range for dimension {d}")));
    }
    let h = random_hermitian(d, rng, 1.0);
    let s = random_hermitian(d, rng, scale);
    let e0 = h.clone().symmetric_eigen();
    let e1 = (&h + &s).symmetric_eigen();
    let mut i0: Vec<usize> = (0..d).collect();
    i0.sort_by(|&a, &b| e0.eigenvalues[a].total_cmp(&e0.eigenvalues[b]));
    let mut i1: Vec<usize> = (0..d).collect();
    i1.sort_by(|&a, &b| e1.eigenvalues[a].total_cmp(&e1.eigenvalues[b]));
    let psi = StateVector::new(e0.eigenvectors.column(i0[level]).into_owned())?;
    let lam1 = e1.eigenvalues[i1[level]];
    let gap = (0..d)
        .filter(|&j| j != level)
        .map(|j| (e1.eigenvalues[i1[j]] - lam1).abs())
        .fold(f64::INFINITY, f64::min);
    let shift = lam1 - e0.eigenvalues[i0[level]];
    let v = DMatrix::from_columns(&[e1.eigenvectors.column(i1[level]).into_owned()]);
    Ok((angle_to_subspace(&psi, &v), eig_angle_bound(&s, &psi, shift, gap)?))
}
