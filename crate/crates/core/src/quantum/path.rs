use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::spectral::{wrap_phase, SpectralOperator, DEGENERACY_TOL};
use super::state::StateVector;
use crate::analysis::speed::SpeedProfile;
use crate::error::{Error, Result};

/// The tracked eigenstate of U_s together with its eigenphase and gap.
#[derive(Clone, Debug)]
pub struct TrackedEigenstate {
    pub s: f64,
    pub state: StateVector,
    pub phase: f64,
    pub gap: f64,
    pub index: usize,
}

/// A family s ↦ (U_s, ψ_s, φ_s, Δ_s) on [0, 1].
pub trait EigenPath: Send + Sync {
    fn dim(&self) -> usize;

    /// Operator and tracked eigenstate at s, computed together.
    fn snapshot(&self, s: f64) -> Result<(SpectralOperator, TrackedEigenstate)>;

    fn gap_lower_bound(&self) -> f64;

    fn operator(&self, s: f64) -> Result<SpectralOperator> {
        Ok(self.snapshot(s)?.0)
    }

    fn target(&self, s: f64) -> Result<TrackedEigenstate> {
        Ok(self.snapshot(s)?.1)
    }

    fn state(&self, s: f64) -> Result<StateVector> {
        Ok(self.target(s)?.state)
    }

    /// Left limit at s. Differs from `state` only at breakpoints.
    fn state_before(&self, s: f64) -> Result<StateVector> {
        self.state(s)
    }

    /// Points in (0, 1) where the path may jump.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// States on a grid with global phases aligned to the previous point.
    fn track(&self, grid: &[f64]) -> Result<Vec<StateVector>> {
        let mut out: Vec<StateVector> = Vec::with_capacity(grid.len());
        for &s in grid {
            let st = self.state(s)?;
            let st = match out.last() {
                Some(prev) => st.aligned_to(prev),
                None => st.canonical(),
            };
            out.push(st);
        }
        Ok(out)
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!("s = {s} outside [0, 1]")));
    }
    Ok(())
}

type Generator = Box<dyn Fn(f64) -> DMatrix<Complex64> + Send + Sync>;
type GapProfile = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// U_s = exp(−iH(s)) tracking the `level`-th lowest eigenvalue of H(s).
pub struct HamiltonianPath {
    dim: usize,
    generator: Generator,
    level: usize,
    gap_lower_bound: f64,
    gap_profile: Option<GapProfile>,
}

impl HamiltonianPath {
    pub fn new(
        dim: usize,
        level: usize,
        gap_lower_bound: f64,
        generator: impl Fn(f64) -> DMatrix<Complex64> + Send + Sync + 'static,
    ) -> Self {
        Self { dim, generator: Box::new(generator), level, gap_lower_bound, gap_profile: None }
    }

    pub fn with_gap_profile(mut self, gap: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.gap_profile = Some(Box::new(gap));
        self
    }

    pub fn hamiltonian(&self, s: f64) -> DMatrix<Complex64> {
        (self.generator)(s)
    }

    /// H(s) = (1−s)A + sB + s(1−s)C with random Hermitian A, B, C, ground state tracked.
    pub fn random_smooth(dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut herm = || {
            let m = DMatrix::from_fn(dim, dim, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
        };
        let (a, b, c) = (herm(), herm(), herm());
        let gen = move |s: f64| {
            &a * Complex64::new(1.0 - s, 0.0) + &b * Complex64::new(s, 0.0) + &c * Complex64::new(s * (1.0 - s), 0.0)
        };
        let path = Self::new(dim, 0, 0.0, gen);
        let mut min_gap = f64::INFINITY;
        for i in 0..=200 {
            min_gap = min_gap.min(path.snapshot(i as f64 / 200.0)?.1.gap);
        }
        Ok(Self { gap_lower_bound: min_gap, ..path })
    }
}

impl EigenPath for HamiltonianPath {
    fn dim(&self) -> usize {
        self.dim
    }

    fn gap_lower_bound(&self) -> f64 {
        self.gap_lower_bound
    }

    fn snapshot(&self, s: f64) -> Result<(SpectralOperator, TrackedEigenstate)> {
        check_s(s)?;
        let op = SpectralOperator::from_hermitian(&(self.generator)(s))?;
        let k = self.level;
        let energies = op.energies().expect("hermitian generator");
        let degenerate = energies
            .iter()
            .enumerate()
            .any(|(j, &e)| j != k && (e - energies[k]).abs() < DEGENERACY_TOL);
        if degenerate {
            return Err(Error::Degenerate { s });
        }
        let gap = match &self.gap_profile {
            Some(g) => g(s),
            None => op.gap(k),
        };
        let t = TrackedEigenstate {
            s,
            state: op.eigenvector(k).canonical(),
            phase: op.phases()[k],
            gap,
            index: k,
        };
        Ok((op, t))
    }
}

/// Analytic gap of the Grover interpolation.
pub fn grover_gap(n: usize, s: f64) -> f64 {
    (1.0 - 4.0 * (1.0 - 1.0 / n as f64) * s * (1.0 - s)).max(0.0).sqrt()
}

/// H(s) = (1−s)(1−|π⟩⟨π|) + s(1−|m⟩⟨m|) with |π⟩ uniform and |m⟩ = |0⟩.
pub fn grover_path(n: usize) -> Result<HamiltonianPath> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("grover path needs N ≥ 2, got {n}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let pi = DVector::from_element(n, Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
    let p_pi = &pi * pi.adjoint();
    let mut p_m = DMatrix::<Complex64>::zeros(n, n);
    p_m[(0, 0)] = one;
    let id = DMatrix::<Complex64>::identity(n, n);
    let a = &id - p_pi;
    let b = &id - p_m;
    let gen = move |s: f64| &a * Complex64::new(1.0 - s, 0.0) + &b * Complex64::new(s, 0.0);
    Ok(HamiltonianPath::new(n, 0, 1.0 / (n as f64).sqrt(), gen).with_gap_profile(move |s| grover_gap(n, s)))
}

/// Great-circle style path ψ_s = cos ℓ(s)|0⟩ + sin ℓ(s)|1⟩ in dimension d.
///
/// The other eigenvectors spread the complement evenly (a Fourier basis), so every
/// non-target eigenphase carries weight at most 1/(d−1) in any path state. Eigenphases
/// sit at φ_s + 2πj/d.
#[derive(Clone, Debug)]
pub struct PlanarPath {
    dim: usize,
    profile: SpeedProfile,
    base_phase: f64,
    drift: f64,
}

impl PlanarPath {
    pub fn new(dim: usize, profile: SpeedProfile) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter("planar path needs d ≥ 2".into()));
        }
        Ok(Self { dim, profile, base_phase: 0.3, drift: 0.7 })
    }

    pub fn great_circle(dim: usize, length: f64) -> Result<Self> {
        Self::new(dim, SpeedProfile::uniform(length))
    }

    pub fn with_phases(mut self, base_phase: f64, drift: f64) -> Self {
        self.base_phase = base_phase;
        self.drift = drift;
        self
    }

    pub fn profile(&self) -> &SpeedProfile {
        &self.profile
    }

    pub fn arc(&self, s: f64) -> f64 {
        self.profile.length_at(s)
    }
}

impl EigenPath for PlanarPath {
    fn dim(&self) -> usize {
        self.dim
    }

    fn gap_lower_bound(&self) -> f64 {
        if self.dim == 2 { PI } else { TAU / self.dim as f64 }
    }

    fn snapshot(&self, s: f64) -> Result<(SpectralOperator, TrackedEigenstate)> {
        check_s(s)?;
        let d = self.dim;
        let l = self.arc(s);
        let (sn, cs) = l.sin_cos();
        let z = Complex64::new(0.0, 0.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        let mut comp: Vec<DVector<Complex64>> = Vec::with_capacity(d - 1);
        let mut c1 = DVector::from_element(d, z);
        c1[0] = re(-sn);
        c1[1] = re(cs);
        comp.push(c1);
        for k in 2..d {
            let mut e = DVector::from_element(d, z);
            e[k] = re(1.0);
            comp.push(e);
        }
        let m = d - 1;
        let norm = re(1.0 / (m as f64).sqrt());
        let mut cols = Vec::with_capacity(d);
        let mut psi = DVector::from_element(d, z);
        psi[0] = re(cs);
        psi[1] = re(sn);
        cols.push(psi);
        for j in 0..m {
            let mut v = DVector::from_element(d, z);
            for (k, ck) in comp.iter().enumerate() {
                let w = Complex64::from_polar(1.0, TAU * (j * k) as f64 / m as f64) * norm;
                v += ck * w;
            }
            cols.push(v);
        }
        let phi = wrap_phase(self.base_phase + self.drift * s);
        let phases: Vec<f64> = (0..d).map(|j| wrap_phase(phi + TAU * j as f64 / d as f64)).collect();
        let op = SpectralOperator::from_spectrum(phases, DMatrix::from_columns(&cols))?;
        let t = TrackedEigenstate {
            s,
            state: op.eigenvector(0).canonical(),
            phase: phi,
            gap: self.gap_lower_bound(),
            index: 0,
        };
        Ok((op, t))
    }
}

/// Piecewise-constant path: state j on [j/n, (j+1)/n), last state at s = 1.
#[derive(Clone, Debug)]
pub struct DiscretePath {
    states: Vec<StateVector>,
}

impl DiscretePath {
    pub fn new(states: Vec<StateVector>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidParameter("discrete path needs at least one state".into()));
        }
        let d = states[0].dim();
        for s in &states {
            if s.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
            }
        }
        Ok(Self { states })
    }

    fn piece(&self, s: f64) -> usize {
        let n = self.states.len();
        ((s * n as f64).floor() as usize).min(n - 1)
    }
}

impl EigenPath for DiscretePath {
    fn dim(&self) -> usize {
        self.states[0].dim()
    }

    fn gap_lower_bound(&self) -> f64 {
        PI
    }

    fn snapshot(&self, s: f64) -> Result<(SpectralOperator, TrackedEigenstate)> {
        check_s(s)?;
        let psi = self.states[self.piece(s)].clone().canonical();
        // eigenphase 0 on ψ, π on the complement
        let basis = super::spectral::orthonormal_completion(std::slice::from_ref(&psi));
        let mut phases = vec![PI; self.dim()];
        phases[0] = 0.0;
        let op = SpectralOperator::from_spectrum(phases, basis)?;
        Ok((op, TrackedEigenstate { s, state: psi, phase: 0.0, gap: PI, index: 0 }))
    }

    fn state_before(&self, s: f64) -> Result<StateVector> {
        check_s(s)?;
        let n = self.states.len();
        let j = s * n as f64;
        if s > 0.0 && (j - j.round()).abs() < 1e-12 {
            let k = (j.round() as usize).clamp(1, n) - 1;
            return Ok(self.states[k].clone().canonical());
        }
        self.state(s)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let n = self.states.len();
        (1..n).map(|j| j as f64 / n as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::{angular_distance, overlap_probability};
    use approx::assert_abs_diff_eq;

    #[test]
    fn grover_endpoints() {
        let p = grover_path(16).unwrap();
        let u = StateVector::uniform(16).unwrap();
        let m = StateVector::basis(16, 0).unwrap();
        assert_abs_diff_eq!(overlap_probability(&p.state(0.0).unwrap(), &u).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(overlap_probability(&p.state(1.0).unwrap(), &m).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn grover_gap_matches_dense_diagonalization() {
        let n = 16;
        let p = grover_path(n).unwrap();
        let mut brute = f64::INFINITY;
        let mut analytic = f64::INFINITY;
        for i in 0..=10_000 {
            let s = i as f64 / 10_000.0;
            let e = SpectralOperator::from_hermitian(&p.hamiltonian(s)).unwrap();
            let en = e.energies().unwrap();
            brute = brute.min(en[1] - en[0]);
            analytic = analytic.min(grover_gap(n, s));
        }
        assert_abs_diff_eq!(brute, analytic, epsilon = 1e-9);
        assert_abs_diff_eq!(analytic, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn grover_tracking_is_continuous() {
        let p = grover_path(16).unwrap();
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let states = p.track(&grid).unwrap();
        for w in states.windows(2) {
            assert!(overlap_probability(&w[0], &w[1]).unwrap() >= 1.0 - 1e-4);
            // aligned phases: real positive overlap
            assert!(w[0].inner(&w[1]).unwrap().re > 0.0);
        }
    }

    #[test]
    fn planar_path_spectrum() {
        let p = PlanarPath::great_circle(8, 1.2).unwrap();
        let (op, t) = p.snapshot(0.5).unwrap();
        assert!(op.reconstruction_residual() < 1e-10);
        let want = StateVector::from_real(&[0.6f64.cos(), 0.6f64.sin(), 0., 0., 0., 0., 0., 0.]).unwrap();
        assert_abs_diff_eq!(overlap_probability(&t.state, &want).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(op.gap(0), TAU / 8.0, epsilon = 1e-12);
        // a different path state spreads its complement evenly over the other eigenvectors
        let w = op.weights(&p.state(0.0).unwrap()).unwrap();
        let q = 1.0 - w[0];
        for &x in &w[1..] {
            assert_abs_diff_eq!(x, q / 7.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn discrete_path_jumps() {
        let a = StateVector::basis(2, 0).unwrap();
        let b = StateVector::from_real(&[1.0, 1.0]).unwrap();
        let p = DiscretePath::new(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(p.breakpoints(), vec![0.5]);
        assert_abs_diff_eq!(angular_distance(&p.state_before(0.5).unwrap(), &a).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(angular_distance(&p.state(0.5).unwrap(), &b).unwrap(), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn random_smooth_is_gapped() {
        let p = HamiltonianPath::random_smooth(4, 9).unwrap();
        assert!(p.gap_lower_bound() > 0.0);
        assert!(p.snapshot(0.37).unwrap().1.gap >= p.gap_lower_bound() * 0.5);
    }
}
