use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// Normalized complex amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    /// Normalizes `amps`. Fails on zero norm or dimension below 2.
    pub fn new(amps: DVector<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidState);
        }
        let norm = amps.norm();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::InvalidState);
        }
        Ok(Self { amps: amps / Complex64::new(norm, 0.0) })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(DVector::from_iterator(
            amps.len(),
            amps.iter().map(|&a| Complex64::new(a, 0.0)),
        ))
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if dim < 2 || k >= dim {
            return Err(Error::InvalidParameter(format!("basis index {k} in dimension {dim}")));
        }
        let mut v = DVector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        Ok(Self { amps: v })
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        Self::from_real(&vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amps
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_dim(other)?;
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn check_dim(&self, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn norm_residual(&self) -> f64 {
        (self.amps.norm() - 1.0).abs()
    }

    pub fn is_normalized(&self) -> bool {
        self.norm_residual() <= NORM_TOL
    }

    /// Rotates the global phase so the largest-magnitude amplitude is real positive.
    pub fn canonical(mut self) -> Self {
        let mut best = 0;
        let mut best_abs = -1.0;
        for (i, a) in self.amps.iter().enumerate() {
            // ties broken toward the lower index, with slack against rounding
            if a.norm() > best_abs + 1e-12 {
                best = i;
                best_abs = a.norm();
            }
        }
        let a = self.amps[best];
        if best_abs > 0.0 {
            let phase = a.conj() / a.norm();
            self.amps *= phase;
        }
        self
    }

    /// Multiplies by the phase that makes ⟨reference|self⟩ real positive.
    pub fn aligned_to(mut self, reference: &StateVector) -> Self {
        let ov = reference.amps.dotc(&self.amps);
        if ov.norm() > 1e-14 {
            self.amps *= ov.conj() / ov.norm();
        }
        self
    }

    /// |self⟩ ⊗ |a⟩ with the ancilla as the fastest index.
    pub fn tensor_ancilla(&self, a: [Complex64; 2]) -> StateVector {
        let d = self.dim();
        let mut v = DVector::zeros(2 * d);
        for i in 0..d {
            v[2 * i] = self.amps[i] * a[0];
            v[2 * i + 1] = self.amps[i] * a[1];
        }
        Self::new(v).expect("tensor product of normalized states")
    }

    /// Contracts the ancilla with ⟨a|, requiring the state to be a product with |a⟩.
    pub fn strip_ancilla(&self, a: [Complex64; 2]) -> Result<StateVector> {
        if self.dim() % 2 != 0 || self.dim() < 4 {
            return Err(Error::InvalidState);
        }
        let d = self.dim() / 2;
        let v = DVector::from_iterator(
            d,
            (0..d).map(|i| a[0].conj() * self.amps[2 * i] + a[1].conj() * self.amps[2 * i + 1]),
        );
        let n = v.norm();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::Entangled);
        }
        Self::new(v)
    }

    pub(crate) fn from_parts_unchecked(amps: DVector<Complex64>) -> Self {
        Self { amps }
    }
}

pub fn overlap_probability(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(psi.inner(phi)?.norm_sqr().min(1.0))
}

pub fn angular_distance(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(psi.inner(phi)?.norm().min(1.0).acos())
}

/// Fidelity |⟨a|b⟩|², alias used by reports.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    overlap_probability(a, b)
}
