use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::state::StateVector;
use crate::error::{Error, Result};

const UNITARY_TOL: f64 = 1e-10;
const RECON_TOL: f64 = 1e-8;
/// Eigenphases closer than this are treated as one eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Reduces an angle to [0, 2π).
pub fn wrap_phase(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU { 0.0 } else { w }
}

/// Signed circular difference a − b in (−π, π].
pub fn phase_diff(a: f64, b: f64) -> f64 {
    let d = wrap_phase(a - b);
    if d > PI { d - TAU } else { d }
}

/// Circular distance in [0, π].
pub fn phase_distance(a: f64, b: f64) -> f64 {
    phase_diff(a, b).abs()
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Unitary (or normal) operator kept alongside its eigendecomposition.
#[derive(Clone, Debug)]
pub struct SpectralOperator {
    matrix: DMatrix<Complex64>,
    phases: Vec<f64>,
    vectors: DMatrix<Complex64>,
    energies: Option<Vec<f64>>,
}

impl SpectralOperator {
    /// U = exp(−iH) for Hermitian H. Eigenphases are −λ mod 2π.
    pub fn from_hermitian(h: &DMatrix<Complex64>) -> Result<Self> {
        let d = h.nrows();
        if d < 2 || h.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: h.ncols() });
        }
        let herm = max_abs(&(h - h.adjoint()));
        if herm > 1e-10 {
            return Err(Error::NotUnitary { residual: herm });
        }
        let eig = h.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
        let phases: Vec<f64> = energies.iter().map(|&e| wrap_phase(-e)).collect();
        let mut op = Self::assemble(phases, vectors)?;
        op.energies = Some(energies);
        Ok(op)
    }

    /// Builds the operator from eigenphases and an orthonormal eigenvector matrix (columns).
    pub fn from_spectrum(phases: Vec<f64>, vectors: DMatrix<Complex64>) -> Result<Self> {
        let d = vectors.nrows();
        if vectors.ncols() != d || phases.len() != d || d < 2 {
            return Err(Error::DimensionMismatch { expected: d, found: phases.len() });
        }
        let gram = vectors.adjoint() * &vectors - DMatrix::<Complex64>::identity(d, d);
        let res = max_abs(&gram);
        if res > UNITARY_TOL {
            return Err(Error::NotUnitary { residual: res });
        }
        Self::assemble(phases.into_iter().map(wrap_phase).collect(), vectors)
    }

    /// Diagonalizes a unitary matrix through its complex Schur form.
    pub fn from_unitary(u: &DMatrix<Complex64>) -> Result<Self> {
        let d = u.nrows();
        if d < 2 || u.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: u.ncols() });
        }
        let res = max_abs(&(u.adjoint() * u - DMatrix::<Complex64>::identity(d, d)));
        if res > UNITARY_TOL {
            return Err(Error::NotUnitary { residual: res });
        }
        let (q, t) = nalgebra::linalg::Schur::new(u.clone()).unpack();
        let phases = (0..d).map(|k| wrap_phase(t[(k, k)].arg())).collect();
        let op = Self::assemble(phases, q)?;
        let recon = max_abs(&(op.reconstruct() - u));
        if recon > RECON_TOL {
            return Err(Error::NotUnitary { residual: recon });
        }
        Ok(Self { matrix: u.clone(), ..op })
    }

    fn assemble(phases: Vec<f64>, vectors: DMatrix<Complex64>) -> Result<Self> {
        let d = vectors.nrows();
        let diag = DMatrix::from_diagonal(&DVector::from_iterator(
            d,
            phases.iter().map(|&p| Complex64::from_polar(1.0, p)),
        ));
        let matrix = &vectors * diag * vectors.adjoint();
        Ok(Self { matrix, phases, vectors, energies: None })
    }

    fn reconstruct(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        let diag = DMatrix::from_diagonal(&DVector::from_iterator(
            d,
            self.phases.iter().map(|&p| Complex64::from_polar(1.0, p)),
        ));
        &self.vectors * diag * self.vectors.adjoint()
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    /// Hamiltonian eigenvalues (ascending) when built from a Hermitian generator.
    pub fn energies(&self) -> Option<&[f64]> {
        self.energies.as_deref()
    }

    pub fn eigenvector(&self, k: usize) -> StateVector {
        StateVector::from_parts_unchecked(self.vectors.column(k).into_owned())
    }

    pub fn apply(&self, x: &StateVector) -> Result<StateVector> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        StateVector::new(&self.matrix * x.amplitudes())
    }

    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.matrix.adjoint() * &self.matrix - DMatrix::<Complex64>::identity(d, d)))
    }

    pub fn reconstruction_residual(&self) -> f64 {
        max_abs(&(self.reconstruct() - &self.matrix))
    }

    /// Coefficients ⟨v_k|x⟩ in the eigenbasis.
    pub fn coefficients(&self, x: &StateVector) -> Result<DVector<Complex64>> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        Ok(self.vectors.adjoint() * x.amplitudes())
    }

    /// Born weights |⟨v_k|x⟩|².
    pub fn weights(&self, x: &StateVector) -> Result<Vec<f64>> {
        Ok(self.coefficients(x)?.iter().map(|a| a.norm_sqr()).collect())
    }

    /// Smallest circular distance from eigenphase k to any other eigenphase.
    pub fn gap(&self, k: usize) -> f64 {
        self.phases
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &p)| phase_distance(p, self.phases[k]))
            .fold(PI, f64::min)
    }

    /// Eigenvector indices grouped into eigenspaces.
    pub fn eigenspaces(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for k in 0..self.dim() {
            match groups
                .iter_mut()
                .find(|g| g.iter().any(|&j| phase_distance(self.phases[j], self.phases[k]) < DEGENERACY_TOL))
            {
                Some(g) => g.push(k),
                None => groups.push(vec![k]),
            }
        }
        groups
    }

    /// Index of the eigenvector with the largest weight in `x`.
    pub fn dominant_index(&self, x: &StateVector) -> Result<usize> {
        let w = self.weights(x)?;
        Ok((0..w.len()).max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap_or(0))
    }
}

/// R_ψ = 1 − 2|ψ⟩⟨ψ| as a spectral operator (phase π on ψ, 0 on the complement).
pub fn reflection_about(psi: &StateVector) -> SpectralOperator {
    let d = psi.dim();
    let basis = orthonormal_completion(std::slice::from_ref(psi));
    let mut phases = vec![0.0; d];
    phases[0] = PI;
    let matrix = DMatrix::<Complex64>::identity(d, d)
        - psi.amplitudes() * psi.amplitudes().adjoint() * c(2.0);
    SpectralOperator { matrix, phases, vectors: basis, energies: None }
}

/// Completes orthonormal columns `first` to a full basis by Gram-Schmidt over standard vectors.
pub fn orthonormal_completion(first: &[StateVector]) -> DMatrix<Complex64> {
    let d = first[0].dim();
    let mut cols: Vec<DVector<Complex64>> = first.iter().map(|s| s.amplitudes().clone()).collect();
    for k in 0..d {
        if cols.len() == d {
            break;
        }
        let mut v = DVector::<Complex64>::zeros(d);
        v[k] = c(1.0);
        for _ in 0..2 {
            for u in &cols {
                let proj = u.dotc(&v);
                v -= u * proj;
            }
        }
        let n = v.norm();
        if n > 1e-6 {
            cols.push(v / c(n));
        }
    }
    DMatrix::from_columns(&cols)
}

/// Orthogonal projector stored through an orthonormal basis of its range.
#[derive(Clone, Debug)]
pub struct Projector {
    basis: DMatrix<Complex64>,
}

impl Projector {
    /// Checks idempotence and Hermiticity, then extracts the range.
    pub fn from_matrix(p: &DMatrix<Complex64>) -> Result<Self> {
        let d = p.nrows();
        let res = max_abs(&(p * p - p)).max(max_abs(&(p - p.adjoint())));
        if p.ncols() != d || res > 1e-10 {
            return Err(Error::InvalidParameter(format!("not a projector (residual {res:e})")));
        }
        let eig = p.clone().symmetric_eigen();
        let cols: Vec<DVector<Complex64>> = (0..d)
            .filter(|&k| eig.eigenvalues[k] > 0.5)
            .map(|k| eig.eigenvectors.column(k).into_owned())
            .collect();
        let basis = if cols.is_empty() { DMatrix::zeros(d, 0) } else { DMatrix::from_columns(&cols) };
        Ok(Self { basis })
    }

    pub fn onto(state: &StateVector) -> Self {
        Self { basis: DMatrix::from_columns(&[state.amplitudes().clone()]) }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        &self.basis * self.basis.adjoint()
    }

    /// ⟨x|P|x⟩
    pub fn weight(&self, x: &StateVector) -> f64 {
        (self.basis.adjoint() * x.amplitudes()).norm_squared()
    }

    pub fn project(&self, x: &StateVector) -> DVector<Complex64> {
        &self.basis * (self.basis.adjoint() * x.amplitudes())
    }
}

/// Projective measurement {P, 1−P}; bit 1 means the state landed in range(P).
pub fn measure_projector<R: Rng + ?Sized>(
    state: &StateVector,
    p: &Projector,
    rng: &mut R,
) -> Result<(bool, StateVector)> {
    if p.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: state.dim() });
    }
    let w = p.weight(state).clamp(0.0, 1.0);
    let bit = rng.gen::<f64>() < w;
    let inside = p.project(state);
    let branch = if bit { inside } else { state.amplitudes() - inside };
    if branch.norm() < 1e-12 {
        return Err(Error::ZeroNormBranch);
    }
    Ok((bit, StateVector::new(branch)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let a = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        (&a + a.adjoint()) * c(0.5)
    }

    #[test]
    fn phase_arithmetic() {
        assert_abs_diff_eq!(wrap_phase(-0.1), TAU - 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(phase_distance(0.1, TAU - 0.1), 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(phase_diff(0.1, TAU - 0.1), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn hermitian_spectrum_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(6, &mut rng);
        let u = SpectralOperator::from_hermitian(&h).unwrap();
        assert!(u.unitarity_residual() < 1e-10);
        assert!(u.reconstruction_residual() < 1e-8);
        for k in 0..6 {
            let v = u.eigenvector(k);
            let uv = u.apply(&v).unwrap();
            let expect = Complex64::from_polar(1.0, u.phases()[k]);
            assert_abs_diff_eq!((v.inner(&uv).unwrap() - expect).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn unitary_diagonalization_handles_degeneracy() {
        let psi = StateVector::from_real(&[1.0, 2.0, 0.5, -1.0]).unwrap();
        let phi = StateVector::from_real(&[0.3, -1.0, 2.0, 0.1]).unwrap();
        let w = reflection_about(&psi).matrix() * reflection_about(&phi).matrix();
        let op = SpectralOperator::from_unitary(&w).unwrap();
        assert!(op.reconstruction_residual() < 1e-8);
        // two eigenphases at ±2θ, the rest at 0
        let theta = psi.inner(&phi).unwrap().norm().acos();
        let mut nonzero: Vec<f64> = op.phases().iter().copied().filter(|&p| phase_distance(p, 0.0) > 1e-6).collect();
        nonzero.sort_by(f64::total_cmp);
        assert_eq!(nonzero.len(), 2);
        assert_abs_diff_eq!(phase_distance(nonzero[0], 0.0), 2.0 * theta, epsilon = 1e-9);
        assert_eq!(op.eigenspaces().len(), 3);
    }

    #[test]
    fn reflection_examples() {
        let psi = StateVector::from_real(&[1.0, 1.0, 0.0]).unwrap();
        let r = reflection_about(&psi);
        let rr = r.matrix() * r.matrix();
        assert!(max_abs(&(rr - DMatrix::<Complex64>::identity(3, 3))) < 1e-10);
        let out = r.apply(&psi).unwrap();
        assert_abs_diff_eq!((psi.inner(&out).unwrap() + c(1.0)).norm(), 0.0, epsilon = 1e-12);
        let chi = StateVector::from_real(&[1.0, -1.0, 3.0]).unwrap();
        let out = r.apply(&chi).unwrap();
        assert_abs_diff_eq!((chi.inner(&out).unwrap() - c(1.0)).norm(), 0.0, epsilon = 1e-12);
        assert!(max_abs(&(r.matrix() - r.matrix().adjoint())) < 1e-10);
        assert!(r.unitarity_residual() < 1e-10);
        assert!(r.reconstruction_residual() < 1e-10);
    }

    #[test]
    fn measurement_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let zero = StateVector::basis(2, 0).unwrap();
        let one = StateVector::basis(2, 1).unwrap();
        let p = Projector::onto(&zero);
        assert_eq!(measure_projector(&zero, &p, &mut rng).unwrap(), (true, zero.clone()));
        assert_eq!(measure_projector(&one, &p, &mut rng).unwrap(), (false, one.clone()));
        let plus = StateVector::from_real(&[1.0, 1.0]).unwrap();
        let n = 100_000;
        let hits = (0..n).filter(|_| measure_projector(&plus, &p, &mut rng).unwrap().0).count();
        let freq = hits as f64 / n as f64;
        let sigma = (0.25 / n as f64).sqrt();
        assert!((freq - 0.5).abs() <= 3.0 * sigma, "freq {freq}");
    }

    #[test]
    fn projector_from_matrix_rejects_non_projectors() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(0.5)]));
        assert!(Projector::from_matrix(&m).is_err());
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(0.0)]));
        assert_eq!(Projector::from_matrix(&m).unwrap().basis.ncols(), 1);
    }
}
