use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use super::Flag;
use crate::error::{Error, Result};
use crate::oracles::{Reflection, ReflectionCost, Session};
use crate::quantum::{phase_distance, wrap_phase, SpectralOperator, StateVector};

const STATE_TOL: f64 = 1e-9;

/// Eigenphase distribution seen by one copy: the target phase carries the φ
/// component, `complement` the normalized φ⊥ component. `None` marks weight that
/// lies outside the unitary's support (the ancilla-one sector after extension).
#[derive(Clone, Debug, PartialEq)]
pub struct CopySpectrum {
    pub target_phase: f64,
    pub complement: Vec<(Option<f64>, f64)>,
}

/// r copies, each a 2-vector in the {φ, φ⊥} frame, with the ψ overlap p.
#[derive(Clone, Debug)]
pub struct MultiCopyState {
    p: f64,
    spectrum: CopySpectrum,
    copies: Vec<[Complex64; 2]>,
    unextended: Option<(f64, CopySpectrum)>,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn psi_amps(p: f64) -> [Complex64; 2] {
    [c(p.sqrt()), c((1.0 - p).max(0.0).sqrt())]
}

fn overlap2(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr()
}

fn sample_weighted<R: Rng + ?Sized>(items: &[(Option<f64>, f64)], rng: &mut R) -> Option<f64> {
    let mut u = rng.gen::<f64>();
    for &(ph, w) in items {
        if u < w {
            return ph;
        }
        u -= w;
    }
    items.iter().rev().find(|it| it.1 > 0.0).and_then(|it| it.0)
}

impl MultiCopyState {
    /// r copies of ψ with overlap p.
    pub fn uniform(p: f64, spectrum: CopySpectrum, r: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("overlap must lie in [0, 1], got {p}")));
        }
        if r == 0 {
            return Err(Error::InvalidParameter("need at least one copy".into()));
        }
        let total: f64 = spectrum.complement.iter().map(|x| x.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("complement weights sum to {total}")));
        }
        Ok(Self { p, spectrum, copies: vec![psi_amps(p); r], unextended: None })
    }

    /// r copies of `psi` against eigenvector `target` of `u`.
    pub fn from_instance(u: &SpectralOperator, target: usize, psi: &StateVector, r: usize) -> Result<Self> {
        let w = u.weights(psi)?;
        let groups = u.eigenspaces();
        let tg = groups.iter().position(|g| g.contains(&target)).unwrap_or(0);
        let p: f64 = groups[tg].iter().map(|&k| w[k]).sum::<f64>().clamp(0.0, 1.0);
        let mut complement: Vec<(Option<f64>, f64)> = groups
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != tg)
            .map(|(_, g)| (Some(u.phases()[g[0]]), g.iter().map(|&k| w[k]).sum::<f64>()))
            .collect();
        let q: f64 = complement.iter().map(|x| x.1).sum();
        if q < 1e-14 {
            complement = vec![(complement.first().and_then(|x| x.0), 1.0)];
        } else {
            complement.iter_mut().for_each(|x| x.1 /= q);
        }
        Self::uniform(p, CopySpectrum { target_phase: u.phases()[target], complement }, r)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    pub fn copies(&self) -> &[[Complex64; 2]] {
        &self.copies
    }

    pub fn spectrum(&self) -> &CopySpectrum {
        &self.spectrum
    }

    pub fn is_extended(&self) -> bool {
        self.unextended.is_some()
    }

    /// ψ in the {φ, φ⊥} frame.
    pub fn psi(&self) -> [Complex64; 2] {
        psi_amps(self.p)
    }

    /// |⟨φ|copy_i⟩|²
    pub fn fidelity_with_phi(&self, i: usize) -> f64 {
        self.copies[i][0].norm_sqr()
    }

    pub fn all_at_psi(&self) -> bool {
        let psi = self.psi();
        self.copies.iter().all(|x| overlap2(x, &psi) > 1.0 - STATE_TOL)
    }

    pub fn all_at_phi(&self) -> bool {
        (0..self.len()).all(|i| self.fidelity_with_phi(i) > 1.0 - STATE_TOL)
    }

    /// Mean fidelity of the copies with φ.
    pub fn mean_phi_fidelity(&self) -> f64 {
        (0..self.len()).map(|i| self.fidelity_with_phi(i)).sum::<f64>() / self.len() as f64
    }

    fn with_copies(&self, copies: Vec<[Complex64; 2]>) -> Self {
        Self { copies, ..self.clone() }
    }

    /// Copies at the given indices.
    pub fn subset(&self, idx: &[usize]) -> Self {
        self.with_copies(idx.iter().map(|&i| self.copies[i]).collect())
    }

    /// Attach the overlap-suppression ancilla to every copy; all copies must be ψ.
    pub fn extend(&self) -> Result<Self> {
        if self.is_extended() {
            return Err(Error::Precondition("copies are already extended".into()));
        }
        if !self.all_at_psi() {
            return Err(Error::Precondition("extension needs every copy in ψ".into()));
        }
        let pt = 0.75 * self.p;
        let rest = 1.0 - pt;
        let mut complement: Vec<(Option<f64>, f64)> =
            self.spectrum.complement.iter().map(|&(ph, w)| (ph, w * 0.75 * (1.0 - self.p) / rest)).collect();
        complement.push((None, 0.25 / rest));
        Ok(Self {
            p: pt,
            spectrum: CopySpectrum { target_phase: self.spectrum.target_phase, complement },
            copies: vec![psi_amps(pt); self.len()],
            unextended: Some((self.p, self.spectrum.clone())),
        })
    }

    /// Remove the ancilla. Copies at φ̃ map to φ and copies at ψ̃ to ψ; any other
    /// copy cannot be contracted and is reported as lost, mapped to φ⊥.
    pub fn contract(&self) -> Result<(Self, bool)> {
        let (p0, spec) = self.unextended.clone().ok_or_else(|| Error::Precondition("copies are not extended".into()))?;
        let psi_t = self.psi();
        let mut ok = true;
        let copies = self
            .copies
            .iter()
            .map(|x| {
                if x[0].norm_sqr() > 1.0 - STATE_TOL {
                    [c(1.0), c(0.0)]
                } else if overlap2(x, &psi_t) > 1.0 - STATE_TOL {
                    psi_amps(p0)
                } else {
                    ok = false;
                    [c(0.0), c(1.0)]
                }
            })
            .collect();
        Ok((Self { p: p0, spectrum: spec, copies, unextended: None }, ok))
    }

    /// One phase-estimation sample per copy: (came from φ, estimate or `None` for no phase).
    fn sample_phases<R: Rng>(&self, s: &mut Session<R>, half_width: f64) -> Vec<(bool, Option<f64>)> {
        let mut out = Vec::with_capacity(self.len());
        for x in &self.copies {
            let from_phi = s.rng.gen::<f64>() < x[0].norm_sqr();
            let centre = if from_phi {
                Some(self.spectrum.target_phase)
            } else {
                sample_weighted(&self.spectrum.complement, &mut s.rng)
            };
            let est = if s.corrupted() {
                Some(s.rng.gen::<f64>() * TAU)
            } else {
                centre.map(|ph| wrap_phase(ph + (2.0 * s.rng.gen::<f64>() - 1.0) * half_width))
            };
            out.push((from_phi, est));
        }
        out
    }

    fn charge_pe<R: Rng>(s: &mut Session<R>, n: usize, resolution: f64) {
        let cost = s.cost(resolution);
        s.ledger.pe_calls += n as u64;
        s.ledger.pe_reversals += n as u64;
        s.ledger.unitary_applications += 2 * n as u64 * cost;
    }
}

/// Result of the parallel eigenphase-range procedure.
#[derive(Clone, Debug)]
pub struct ErOutcome {
    pub window_found: bool,
    pub phase: Option<f64>,
    /// Per copy: labelled as φ.
    pub labels: Vec<bool>,
    /// Number of copies labelled φ.
    pub j: usize,
    pub copies: MultiCopyState,
    /// Window found, labels match the true branches and the phase is within Δ/5.
    pub success: bool,
}

/// Window of width 2Δ/5 holding more than half of all copies: returns the
/// anchor with the largest count and the circular median of its samples.
fn majority_window(samples: &[Option<f64>], width: f64, r: usize) -> Option<(f64, Vec<bool>)> {
    let mut phases: Vec<f64> = samples.iter().flatten().copied().collect();
    phases.sort_by(f64::total_cmp);
    let mut best: Option<(usize, f64)> = None;
    for &x in &phases {
        let n = phases.iter().filter(|&&y| wrap_phase(y - x).rem_euclid(TAU) <= width).count();
        if best.map_or(true, |(m, _)| n > m) {
            best = Some((n, x));
        }
    }
    let (n, anchor) = best?;
    if 2 * n <= r {
        return None;
    }
    let inside = |y: f64| wrap_phase(y - anchor).rem_euclid(TAU) <= width;
    let mut offs: Vec<f64> = phases.iter().filter(|&&y| inside(y)).map(|&y| wrap_phase(y - anchor).rem_euclid(TAU)).collect();
    offs.sort_by(f64::total_cmp);
    let m = offs.len();
    let med = if m % 2 == 1 { offs[m / 2] } else { 0.5 * (offs[m / 2 - 1] + offs[m / 2]) };
    let labels = samples.iter().map(|x| x.is_some_and(inside)).collect();
    Some((wrap_phase(anchor + med), labels))
}

/// ER: phase estimation at resolution Δ/5 on every copy, a majority window, and
/// the reversal that leaves each copy in φ or φ⊥.
pub fn er_parallel<R: Rng>(s: &mut Session<R>, state: &MultiCopyState, delta: f64) -> Result<ErOutcome> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("gap bound must be positive, got {delta}")));
    }
    let r = state.len();
    let samples = state.sample_phases(s, delta / 5.0);
    MultiCopyState::charge_pe(s, r, delta / 5.0);
    // the reversal leaves each copy in the branch it was projected on
    let copies = state.with_copies(
        samples.iter().map(|&(from_phi, _)| if from_phi { [c(1.0), c(0.0)] } else { [c(0.0), c(1.0)] }).collect(),
    );
    let est: Vec<Option<f64>> = samples.iter().map(|x| x.1).collect();
    match majority_window(&est, 2.0 * delta / 5.0, r) {
        None => Ok(ErOutcome { window_found: false, phase: None, labels: vec![false; r], j: 0, copies, success: false }),
        Some((phase, labels)) => {
            let j = labels.iter().filter(|&&b| b).count();
            let truthful = labels.iter().zip(&samples).all(|(&l, &(t, _))| l == t);
            let close = phase_distance(phase, state.spectrum.target_phase) <= delta / 5.0 + 1e-12;
            Ok(ErOutcome { window_found: true, phase: Some(phase), labels, j, copies, success: truthful && close })
        }
    }
}

/// Result of a multi-copy transformation.
#[derive(Clone, Debug)]
pub struct MultiOutcome {
    /// Output agrees with the flag: φ on every copy and a phase within Δ/5 for
    /// flag 1 (or no flag), ψ on every copy for #.
    pub success: bool,
    pub flag: Option<Flag>,
    pub reported_phase: Option<f64>,
    pub reflections: u64,
    pub pe_calls: u64,
    pub t_instances: usize,
    pub copies: MultiCopyState,
}

fn two_dim(x: [Complex64; 2]) -> Result<StateVector> {
    StateVector::new(nalgebra::DVector::from_vec(x.to_vec()))
}

/// T on a single copy in the 2-dimensional frame, reflections charged at resolution Δ.
fn t_on_copy<R: Rng>(s: &mut Session<R>, p: f64, start: [Complex64; 2], delta: f64) -> Result<[Complex64; 2]> {
    let cost = ReflectionCost::Oracle { resolution: delta };
    let r_psi = Reflection::about_with_cost(&two_dim(psi_amps(p))?, cost);
    let r_phi = Reflection::about_with_cost(&two_dim([c(1.0), c(0.0)])?, cost);
    let out = super::transform_t(s, &r_psi, &r_phi, &two_dim(start)?)?;
    let a = out.state.amplitudes();
    Ok([a[0], a[1]])
}

/// Runs ER then T on the copies labelled φ⊥, then contracts.
fn finish_with_er<R: Rng>(
    s: &mut Session<R>,
    ext: &MultiCopyState,
    er_idx: &[usize],
    extra: &[usize],
    delta: f64,
) -> Result<(bool, Option<f64>, usize, MultiCopyState)> {
    let er = er_parallel(s, &ext.subset(er_idx), delta)?;
    let mut copies = ext.copies.clone();
    for (k, &i) in er_idx.iter().enumerate() {
        copies[i] = er.copies.copies[k];
    }
    if !er.window_found {
        let (out, _) = ext.with_copies(copies).contract()?;
        return Ok((false, None, 0, out));
    }
    let mut todo: Vec<usize> = er_idx.iter().zip(&er.labels).filter(|(_, &l)| !l).map(|(&i, _)| i).collect();
    todo.extend_from_slice(extra);
    for &i in &todo {
        copies[i] = t_on_copy(s, ext.p, copies[i], delta)?;
    }
    let (out, ok) = ext.with_copies(copies).contract()?;
    let phase = er.phase.unwrap();
    let close = phase_distance(phase, ext.spectrum.target_phase) <= delta / 5.0 + 1e-12;
    Ok((ok && close && out.all_at_phi(), Some(phase), todo.len(), out))
}

/// T_p: suppression ancilla, ER, T on every copy labelled φ⊥.
pub fn transform_tp<R: Rng>(s: &mut Session<R>, state: &MultiCopyState, delta: f64) -> Result<MultiOutcome> {
    let before = s.ledger.clone();
    let ext = state.extend()?;
    let all: Vec<usize> = (0..ext.len()).collect();
    let (success, phase, t_instances, copies) = finish_with_er(s, &ext, &all, &[], delta)?;
    let d = s.ledger.since(&before);
    Ok(MultiOutcome {
        success,
        flag: None,
        reported_phase: phase,
        reflections: d.reflections,
        pe_calls: d.pe_calls,
        t_instances,
        copies,
    })
}

/// Result of the lattice-threshold procedure ER_x.
#[derive(Clone, Debug)]
pub struct ErxOutcome {
    pub b: bool,
    /// Copies found in ψ by the closing ψ-measurements.
    pub j: usize,
    /// Copies left exactly in ψ (true) or ψ⊥.
    pub in_psi: Vec<bool>,
    pub copies: MultiCopyState,
    /// Monte Carlo estimate of P(b) that drove the restoration.
    pub p_hat: f64,
    pub restored: bool,
}

/// Guarantee of ER_x that applies to a given true overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErxContract {
    /// p > p_m: b = 1 and every copy restored.
    Above,
    /// p ≤ p_m − 2γ: b = 0 and every copy restored.
    Below,
    /// In between: at least r/20 copies restored.
    Between,
}

impl ErxContract {
    pub fn for_overlap(p: f64, p_m: f64, gamma: f64) -> Self {
        if p > p_m {
            Self::Above
        } else if p <= p_m - 2.0 * gamma {
            Self::Below
        } else {
            Self::Between
        }
    }

    pub fn holds(self, out: &ErxOutcome) -> bool {
        let r = out.in_psi.len();
        match self {
            Self::Above => out.b && out.j == r,
            Self::Below => !out.b && out.j == r,
            Self::Between => 20 * out.j >= r,
        }
    }
}

fn lattice_threshold(samples: &[Option<f64>], spacing: f64, threshold: f64) -> bool {
    let n = (TAU / spacing).ceil() as usize;
    let mut counts = vec![0usize; n];
    let mut seen: Vec<usize> = Vec::with_capacity(4);
    for x in samples.iter().flatten() {
        seen.clear();
        let lo = ((x - spacing) / spacing).floor() as i64;
        for l in lo..=lo + 3 {
            let k = l.rem_euclid(n as i64) as usize;
            if !seen.contains(&k) && phase_distance(*x, k as f64 * spacing) <= spacing {
                seen.push(k);
                counts[k] += 1;
            }
        }
    }
    counts.iter().any(|&k| k as f64 >= threshold)
}

/// ER_x: phase estimation at resolution δ′/2 with δ′ = min(δ/2, Δ/4), the bit b
/// set when some lattice point lδ′ has at least (p_m − γ)r samples within δ′,
/// then a ψ-measurement on every copy.
///
/// The post-measurement state is modelled as follows: with probability P̂(b),
/// estimated from `inner_mc` independent resamples, the outcome was near-certain
/// and every copy returns to ψ; otherwise copies collapse onto their branch
/// (φ or φ⊥) before the ψ-measurement.
pub fn er_x<R: Rng>(
    s: &mut Session<R>,
    state: &MultiCopyState,
    delta: f64,
    resolution: f64,
    p_m: f64,
    gamma: f64,
    inner_mc: usize,
) -> Result<ErxOutcome> {
    if !(delta > 0.0 && resolution > 0.0 && gamma > 0.0) {
        return Err(Error::InvalidParameter("ER_x needs positive Δ, δ and γ".into()));
    }
    if !state.all_at_psi() {
        return Err(Error::Precondition("ER_x needs every copy in ψ".into()));
    }
    let r = state.len();
    let dp = (resolution / 2.0).min(delta / 4.0);
    let threshold = (p_m - gamma) * r as f64;
    let samples = state.sample_phases(s, dp / 2.0);
    MultiCopyState::charge_pe(s, r, dp / 2.0);
    let est: Vec<Option<f64>> = samples.iter().map(|x| x.1).collect();
    let b = lattice_threshold(&est, dp, threshold);
    let mut agree = 0usize;
    let mut scratch = Session::new(s.config.clone(), &mut s.rng);
    for _ in 0..inner_mc {
        let again: Vec<Option<f64>> = state.sample_phases(&mut scratch, dp / 2.0).into_iter().map(|x| x.1).collect();
        agree += (lattice_threshold(&again, dp, threshold) == b) as usize;
    }
    let p_hat = if inner_mc == 0 { 1.0 } else { agree as f64 / inner_mc as f64 };
    let restored = s.rng.gen::<f64>() < p_hat;
    let psi = state.psi();
    let r_psi = Reflection::about_with_cost(&two_dim(psi)?, ReflectionCost::Oracle { resolution: delta });
    let mut copies = Vec::with_capacity(r);
    let mut in_psi = Vec::with_capacity(r);
    for &(from_phi, _) in &samples {
        let x = if restored {
            psi
        } else if from_phi {
            [c(1.0), c(0.0)]
        } else {
            [c(0.0), c(1.0)]
        };
        let (hit, y) = s.measure_reflection(&r_psi, &two_dim(x)?)?;
        let a = y.amplitudes();
        copies.push(if hit { psi } else { [a[0], a[1]] });
        in_psi.push(hit);
    }
    let j = in_psi.iter().filter(|&&h| h).count();
    Ok(ErxOutcome { b, j, in_psi, copies: state.with_copies(copies), p_hat, restored })
}

/// T_px: ER_x at p_m = 3(1 − γ)/4 on the extended copies. Returns # with every
/// copy in ψ when b = 0 and nothing was disturbed; otherwise ER on the copies
/// found in ψ and T on every other copy, flag 1.
pub fn transform_tpx<R: Rng>(
    s: &mut Session<R>,
    state: &MultiCopyState,
    delta: f64,
    resolution: f64,
    gamma: f64,
    inner_mc: usize,
) -> Result<MultiOutcome> {
    let before = s.ledger.clone();
    let ext = state.extend()?;
    let r = ext.len();
    let erx = er_x(s, &ext, delta, resolution, 0.75 * (1.0 - gamma), 0.75 * gamma, inner_mc)?;
    let finish = |s: &mut Session<R>, success, flag, phase, t_instances, copies| {
        let d = s.ledger.since(&before);
        MultiOutcome { success, flag, reported_phase: phase, reflections: d.reflections, pe_calls: d.pe_calls, t_instances, copies }
    };
    if !erx.b && erx.j == r {
        let (out, ok) = erx.copies.contract()?;
        let ok = ok && out.all_at_psi();
        return Ok(finish(s, ok, Some(Flag::Hash), None, 0, out));
    }
    let hits: Vec<usize> = (0..r).filter(|&i| erx.in_psi[i]).collect();
    let misses: Vec<usize> = (0..r).filter(|&i| !erx.in_psi[i]).collect();
    if hits.is_empty() {
        let (out, _) = erx.copies.contract()?;
        return Ok(finish(s, false, Some(Flag::One), None, 0, out));
    }
    let (success, phase, t_instances, out) = finish_with_er(s, &erx.copies, &hits, &misses, delta)?;
    Ok(finish(s, success, Some(Flag::One), phase, t_instances, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::OracleConfig;

    fn spectrum() -> CopySpectrum {
        CopySpectrum { target_phase: 0.5, complement: vec![(Some(2.0), 0.5), (Some(4.0), 0.5)] }
    }

    fn session(seed: u64) -> Session {
        Session::seeded(OracleConfig::default(), seed, 0)
    }

    #[test]
    fn extend_then_contract_round_trips() {
        let st = MultiCopyState::uniform(0.8, spectrum(), 5).unwrap();
        let ext = st.extend().unwrap();
        assert!((ext.p() - 0.6).abs() < 1e-15);
        let total: f64 = ext.spectrum().complement.iter().map(|x| x.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let (back, ok) = ext.contract().unwrap();
        assert!(ok && back.all_at_psi());
        assert_eq!(back.spectrum(), st.spectrum());
    }

    #[test]
    fn er_full_overlap_is_exact() {
        let mut s = session(1);
        let st = MultiCopyState::uniform(1.0, spectrum(), 11).unwrap();
        for _ in 0..50 {
            let out = er_parallel(&mut s, &st, 0.3).unwrap();
            assert!(out.success && out.j == 11);
            assert!((out.phase.unwrap() - 0.5).abs() <= 0.06 + 1e-12);
        }
        assert_eq!(s.ledger.pe_calls, 550);
        assert_eq!(s.ledger.pe_reversals, 550);
    }

    #[test]
    fn window_wraps_through_zero() {
        let samples: Vec<Option<f64>> = vec![Some(6.27), Some(6.28), Some(0.001), Some(0.01), Some(3.0)];
        let (phase, labels) = majority_window(&samples, 0.1, 5).unwrap();
        assert_eq!(labels, vec![true, true, true, true, false]);
        assert!(phase_distance(phase, 6.283) < 0.02);
    }

    #[test]
    fn tp_full_overlap_applies_t_only_to_hash_copies() {
        let mut s = session(2);
        let st = MultiCopyState::uniform(1.0, spectrum(), 40).unwrap();
        let mut total_t = 0;
        for _ in 0..50 {
            let out = transform_tp(&mut s, &st, 0.3).unwrap();
            assert!(out.success);
            assert!(out.copies.all_at_phi());
            total_t += out.t_instances;
        }
        // about a quarter of the copies land in the ancilla-one sector
        let frac = total_t as f64 / 2000.0;
        assert!((frac - 0.25).abs() < 0.05, "{frac}");
    }

    #[test]
    fn erx_regimes() {
        let mut s = session(3);
        let (pm, g) = (0.6, 0.1);
        for (p, contract) in [(0.9, ErxContract::Above), (0.2, ErxContract::Below)] {
            let st = MultiCopyState::uniform(p, spectrum(), 200).unwrap();
            assert_eq!(ErxContract::for_overlap(p, pm, g), contract);
            for _ in 0..20 {
                let out = er_x(&mut s, &st, 0.3, 0.05, pm, g, 16).unwrap();
                assert!(contract.holds(&out), "{p} {} {}", out.b, out.j);
            }
        }
    }

    #[test]
    fn tpx_flags() {
        let mut s = session(4);
        let g = 0.1;
        let high = MultiCopyState::uniform(1.0, spectrum(), 100).unwrap();
        let low = MultiCopyState::uniform(0.3, spectrum(), 100).unwrap();
        for _ in 0..10 {
            let out = transform_tpx(&mut s, &high, 0.3, 0.05, g, 16).unwrap();
            assert_eq!(out.flag, Some(Flag::One));
            assert!(out.success);
            let out = transform_tpx(&mut s, &low, 0.3, 0.05, g, 16).unwrap();
            assert_eq!(out.flag, Some(Flag::Hash));
            assert!(out.success && out.copies.all_at_psi());
        }
    }
}
