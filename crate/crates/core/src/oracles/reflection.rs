use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::Session;
use crate::error::{Error, Result};
use crate::quantum::{phase_distance, SpectralOperator, StateVector};

/// How a reflection is charged to the ledger.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReflectionCost {
    /// Exactly available reflection, one unit.
    Exact,
    /// Realized by a reflection oracle at the given resolution.
    Oracle { resolution: f64 },
}

/// 1 − 2P for the projector P onto span(axes).
#[derive(Clone, Debug)]
pub struct Reflection {
    axes: DMatrix<Complex64>,
    cost: ReflectionCost,
}

impl Reflection {
    pub fn about(psi: &StateVector) -> Self {
        Self::about_with_cost(psi, ReflectionCost::Exact)
    }

    pub fn about_with_cost(psi: &StateVector, cost: ReflectionCost) -> Self {
        Self { axes: DMatrix::from_columns(&[psi.amplitudes().clone()]), cost }
    }

    /// R(U, φ0, δ) in ideal mode: flips eigenvectors nearer than δ/2 to φ0, which is
    /// the nearest-threshold rule between δ/4 and 3δ/4.
    pub fn oracle(u: &SpectralOperator, phi0: f64, delta: f64) -> Self {
        let cols: Vec<DVector<Complex64>> = (0..u.dim())
            .filter(|&k| phase_distance(u.phases()[k], phi0) < delta / 2.0)
            .map(|k| u.eigenvectors().column(k).into_owned())
            .collect();
        let axes = if cols.is_empty() { DMatrix::zeros(u.dim(), 0) } else { DMatrix::from_columns(&cols) };
        Self { axes, cost: ReflectionCost::Oracle { resolution: delta } }
    }

    /// Reflection about span(axes ⊗ a) on the ancilla-extended space.
    pub fn extended(&self, a: [Complex64; 2]) -> Self {
        let d = self.dim();
        let k = self.axes.ncols();
        let mut m = DMatrix::zeros(2 * d, k);
        for j in 0..k {
            for i in 0..d {
                m[(2 * i, j)] = self.axes[(i, j)] * a[0];
                m[(2 * i + 1, j)] = self.axes[(i, j)] * a[1];
            }
        }
        Self { axes: m, cost: self.cost }
    }

    pub fn dim(&self) -> usize {
        self.axes.nrows()
    }

    pub fn rank(&self) -> usize {
        self.axes.ncols()
    }

    pub fn cost(&self) -> ReflectionCost {
        self.cost
    }

    /// The axis state of a rank-one reflection.
    pub fn axis(&self) -> Option<StateVector> {
        (self.rank() == 1).then(|| StateVector::new(self.axes.column(0).into_owned()).expect("unit axis"))
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::identity(d, d) - &self.axes * self.axes.adjoint() * Complex64::new(2.0, 0.0)
    }

    /// ‖P x‖²
    pub fn flipped_weight(&self, x: &StateVector) -> f64 {
        (self.axes.adjoint() * x.amplitudes()).norm_squared()
    }

    fn inside(&self, x: &StateVector) -> DVector<Complex64> {
        &self.axes * (self.axes.adjoint() * x.amplitudes())
    }

    fn check(&self, x: &StateVector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        Ok(())
    }

    /// Uncharged application.
    pub fn apply(&self, x: &StateVector) -> Result<StateVector> {
        self.check(x)?;
        StateVector::new(x.amplitudes() - self.inside(x) * Complex64::new(2.0, 0.0))
    }

    /// Uncharged projective measurement; `true` means the state is in range(P).
    pub fn measure<R: Rng + ?Sized>(&self, x: &StateVector, rng: &mut R) -> Result<(bool, StateVector)> {
        self.check(x)?;
        let w = self.flipped_weight(x).clamp(0.0, 1.0);
        let bit = rng.gen::<f64>() < w;
        let inside = self.inside(x);
        let branch = if bit { inside } else { x.amplitudes() - inside };
        if branch.norm() < 1e-12 {
            return Err(Error::ZeroNormBranch);
        }
        Ok((bit, StateVector::new(branch)?))
    }
}

impl<R: Rng> Session<R> {
    fn charge_reflection(&mut self, r: &Reflection) {
        self.ledger.reflections += 1;
        match r.cost {
            ReflectionCost::Exact => self.ledger.unitary_applications += 1,
            ReflectionCost::Oracle { resolution } => {
                self.ledger.reflect_calls += 1;
                self.ledger.unitary_applications += self.cost(resolution);
            }
        }
    }

    /// Charged reflection. In noisy mode an oracle-realized flip is skipped with probability ε².
    pub fn apply_reflection(&mut self, r: &Reflection, x: &StateVector) -> Result<StateVector> {
        self.charge_reflection(r);
        if matches!(r.cost, ReflectionCost::Oracle { .. }) && self.corrupted() {
            r.check(x)?;
            return Ok(x.clone());
        }
        r.apply(x)
    }

    /// Charged measurement realized as a controlled reflection.
    pub fn measure_reflection(&mut self, r: &Reflection, x: &StateVector) -> Result<(bool, StateVector)> {
        self.charge_reflection(r);
        r.measure(x, &mut self.rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::OracleConfig;
    use crate::quantum::overlap_probability;
    use approx::assert_abs_diff_eq;

    #[test]
    fn extended_reflection_matches_tensor_state() {
        let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let a = [Complex64::new(0.75f64.sqrt(), 0.0), Complex64::new(0.5, 0.0)];
        let r = Reflection::about(&psi).extended(a);
        let direct = Reflection::about(&psi.tensor_ancilla(a));
        let diff = r.matrix() - direct.matrix();
        assert!(crate::quantum::spectral::max_abs(&diff) < 1e-12);
    }

    #[test]
    fn session_charges() {
        let mut s = Session::seeded(OracleConfig::default(), 1, 0);
        let psi = StateVector::basis(2, 0).unwrap();
        let r = Reflection::about_with_cost(&psi, ReflectionCost::Oracle { resolution: 0.5 });
        let out = s.apply_reflection(&r, &psi).unwrap();
        assert_abs_diff_eq!(overlap_probability(&out, &psi).unwrap(), 1.0);
        assert_eq!(s.ledger.reflections, 1);
        assert_eq!(s.ledger.reflect_calls, 1);
        assert_eq!(s.ledger.unitary_applications, s.cost(0.5));
    }
}
