use std::f64::consts::PI;
use std::sync::Arc;

use super::{Evaluation, Experiment, Params, PathSpec, TrialRecord};
use crate::analysis::ldev::TX_PRIME_EXPONENT;
use crate::analysis::stats::{correlation, rate_above, rate_below, rate_matches, same_mean, MeanEstimate, SIGMA_SLACK};
use crate::analysis::{
    bit_cost_bound, bit_cost_enumerated, bit_cost_rough, galton_watson_size, gw_gamma_bound, gw_gamma_max, gw_mean,
    gw_total_mean, moment_check, overlap_for_success, projected_rate, random_angle_instance, random_count_exponents,
    random_count_sample, rate_bound, rho_theta, sigma_theta, simulate_t_chain, t_mean, tx_prime_success,
    verify_ldev_composition, SpeedProfile,
};
use crate::error::{Error, Result};
use crate::onestep::{
    dominance_holds, er_parallel, er_x, rt_attempt, transform_t, transform_tm, transform_tmx_prime, transform_tp,
    transform_tpx, transform_tx, transform_tx_prime, CopySpectrum, ErxContract, Flag, MultiCopyState,
};
use crate::oracles::{OracleConfig, Reflection, Session};
use crate::quantum::{
    angular_distance, grover_gap, grover_path, overlap_probability, phase_distance, velocity_profile, EigenPath,
    HamiltonianPath, PlanarPath, StateVector,
};
use crate::traversal::{
    reduce_checkpoints, traverse_known, traverse_parallel, traverse_recursive_dominant, traverse_recursive_overlap_free,
    Checkpoints, DominantParams, TraversalReport, DEPTH_CAP,
};

const FID_TOL: f64 = 1e-9;

fn fid_ok(f: f64) -> bool {
    f >= 1.0 - FID_TOL
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

/// φ = e₀ and ψ = √p e₀ + √q e₁ in three dimensions.
struct Plane {
    r_psi: Reflection,
    r_phi: Reflection,
    psi: StateVector,
    phi: StateVector,
}

impl Plane {
    fn new(p: f64) -> Result<Self> {
        let psi = StateVector::from_real(&[p.sqrt(), (1.0 - p).max(0.0).sqrt(), 0.0])?;
        let phi = StateVector::basis(3, 0)?;
        Ok(Self { r_psi: Reflection::about(&psi), r_phi: Reflection::about(&phi), psi, phi })
    }

    fn at(&self, p0: f64) -> Result<StateVector> {
        StateVector::from_real(&[p0.sqrt(), (1.0 - p0).max(0.0).sqrt(), 0.0])
    }
}

fn column(records: &[TrialRecord], f: impl Fn(&TrialRecord) -> f64) -> Vec<f64> {
    records.iter().map(f).collect()
}

fn n_of(records: &[TrialRecord]) -> Vec<f64> {
    column(records, |r| r.n_reflections as f64)
}

fn extra(records: &[TrialRecord], k: usize) -> Vec<f64> {
    column(records, |r| r.extra[k])
}

fn estimate(ev: &mut Evaluation, name: &str, xs: &[f64]) -> MeanEstimate {
    let m = MeanEstimate::of(xs);
    ev.aggregate(&format!("{name}_mean"), m.mean);
    ev.aggregate(&format!("{name}_se"), m.se);
    m
}

fn mean_matches(ev: &mut Evaluation, name: &str, m: &MeanEstimate, target: f64) {
    ev.bound(name, target);
    ev.verdict(name, m.mean, target, m.matches(target));
}

fn mean_below(ev: &mut Evaluation, name: &str, m: &MeanEstimate, bound: f64) {
    ev.bound(name, bound);
    ev.verdict(name, m.mean, bound, m.below(bound));
}

fn every(ev: &mut Evaluation, name: &str, records: &[TrialRecord], ok: impl Fn(&TrialRecord) -> bool) {
    let good = records.iter().filter(|r| ok(r)).count();
    ev.verdict(name, good as f64, records.len() as f64, good == records.len());
}

fn failure_rate(ev: &mut Evaluation, name: &str, failures: usize, n: usize, bound: f64) {
    let b = bound.min(1.0);
    ev.bound(name, b);
    ev.aggregate(&format!("{name}_observed"), failures as f64 / n as f64);
    ev.verdict(name, failures as f64 / n as f64, b, rate_below(failures, n, b));
}

/// ⟨Γ^x⟩ ≤ Γ^exponent (1 + 3σ); verdict values in log space.
fn moment(ev: &mut Evaluation, name: &str, xs: &[f64], gamma: f64, exponent: f64) {
    if xs.len() < 2 {
        ev.aggregate(&format!("{name}_skipped_samples"), xs.len() as f64);
        return;
    }
    let c = moment_check(xs, gamma, exponent);
    ev.aggregate(&format!("{name}_rel_se"), c.rel_se);
    ev.bound(name, c.log_bound);
    ev.verdict(name, c.log_moment, c.log_bound + (1.0 + SIGMA_SLACK * c.rel_se).ln(), c.pass);
}

fn uncorrelated(ev: &mut Evaluation, name: &str, x: &[f64], y: &[f64]) {
    let (rho, se) = correlation(x, y);
    let rho = if rho.is_nan() { 0.0 } else { rho };
    ev.verdict(name, rho.abs(), SIGMA_SLACK * se, rho.abs() <= SIGMA_SLACK * se);
}

fn pe_charges(s: &Session) -> u64 {
    s.ledger.pe_calls + s.ledger.pe_reversals
}

fn with_report(id: u64, rep: &TraversalReport) -> TrialRecord {
    TrialRecord {
        n_reflections: rep.reflections,
        pe_calls: rep.ledger.pe_calls + rep.ledger.pe_reversals,
        success: rep.success && rep.is_consistent(),
        final_fidelity: rep.final_fidelity,
        ..TrialRecord::new(id)
    }
}

/// Target phase 1 and a complement spread over the given offsets.
fn spectrum(offsets: &[(f64, f64)]) -> CopySpectrum {
    CopySpectrum { target_phase: 1.0, complement: offsets.iter().map(|&(o, w)| (Some(1.0 + o), w)).collect() }
}

fn even_spectrum(offsets: &[f64]) -> CopySpectrum {
    let w = 1.0 / offsets.len() as f64;
    spectrum(&offsets.iter().map(|&o| (o, w)).collect::<Vec<_>>())
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg.to_string()))
    }
}

fn path_or(path: Option<&PathSpec>, default: impl FnOnce() -> Result<Arc<dyn EigenPath>>) -> Result<Arc<dyn EigenPath>> {
    match path {
        Some(p) => p.build(),
        None => default(),
    }
}

pub(crate) fn build(name: &str, p: &Params, path: Option<&PathSpec>) -> Result<Box<dyn Experiment>> {
    Ok(match name {
        "rt-transition" => Box::new(RtTransition { p: p.get("p"), plane: Plane::new(p.get("p"))? }),
        "t" => {
            let pp = p.get("p");
            Box::new(TChain { p: pp, p0: p.opt("p0").unwrap_or(pp), plane: Plane::new(pp)? })
        }
        "tm" => Box::new(Tm { p: p.get("p"), plane: Plane::new(p.get("p"))? }),
        "tx" => Box::new(Tx { p: p.get("p"), plane: Plane::new(p.get("p"))? }),
        "tx-prime" => Box::new(TxPrime { p: p.get("p"), plane: Plane::new(p.get("p"))?, suppressed: false }),
        "tmx-prime" => Box::new(TxPrime { p: p.get("p"), plane: Plane::new(p.get("p"))?, suppressed: true }),
        "er" => Er::new(p)?,
        "erx" => Erx::new(p)?,
        "tp" => Tp::new(p)?,
        "tpx" => Tpx::new(p)?,
        "known-overlaps" => Known::new(p, path)?,
        "parallel" => Parallel::new(p, path)?,
        "dominant" => Dominant::new(p, path)?,
        "overlap-free" => OverlapFree::new(p, path)?,
        "reduction" => Reduce::new(p)?,
        "galton-watson" => Box::new(Gw { p_s: p.get("p_s") }),
        "speed" => Speed::new(p)?,
        "perturbation" => Perturb::new(p)?,
        "ldev-composition" => Box::new(Compose { plane: Plane::new(p.get("p"))?, steps: p.count("steps") }),
        "ldev-random-count" => Box::new(RandomCount { p_s: p.get("p_s"), idle: p.get("idle_prob") }),
        "cost-ratio" => CostRatio::new(p)?,
        other => return Err(invalid(format!("no implementation for '{other}'"))),
    })
}

struct RtTransition {
    p: f64,
    plane: Plane,
}

impl Experiment for RtTransition {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let perp = StateVector::basis(3, 1)?;
        let (hit, x) = rt_attempt(s, &self.plane.r_psi, &self.plane.r_phi, &perp)?;
        Ok(TrialRecord {
            n_reflections: s.ledger.reflections,
            success: hit,
            final_fidelity: overlap_probability(&x, &self.plane.phi)?,
            ..TrialRecord::new(id)
        })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let hits = rs.iter().filter(|r| r.success).count();
        let target = 4.0 * self.p * (1.0 - self.p);
        ev.aggregate("transition_rate", hits as f64 / rs.len() as f64);
        ev.bound("transition_probability", target);
        ev.verdict("transition_probability", hits as f64 / rs.len() as f64, target, rate_matches(hits, rs.len(), target));
    }
}

struct TChain {
    p: f64,
    p0: f64,
    plane: Plane,
}

impl Experiment for TChain {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let out = transform_t(s, &self.plane.r_psi, &self.plane.r_phi, &self.plane.at(self.p0)?)?;
        let f = overlap_probability(&out.state, &self.plane.phi)?;
        let classical = simulate_t_chain(self.p, self.p0, &mut s.rng) as f64;
        Ok(TrialRecord {
            n_reflections: out.reflections,
            success: fid_ok(f),
            final_fidelity: f,
            extra: vec![classical],
            ..TrialRecord::new(id)
        })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let n = estimate(ev, "n", &n_of(rs));
        let c = estimate(ev, "classical_n", &extra(rs, 0));
        mean_matches(ev, "mean_n", &n, t_mean(self.p, self.p0));
        mean_matches(ev, "classical_mean_n", &c, t_mean(self.p, self.p0));
        ev.verdict("quantum_matches_classical", (n.mean - c.mean).abs(), SIGMA_SLACK * n.se.hypot(c.se), same_mean(&n, &c));
        every(ev, "ends_at_phi", rs, |r| r.success);
    }
}

struct Tm {
    p: f64,
    plane: Plane,
}

impl Experiment for Tm {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let out = transform_tm(s, &self.plane.r_psi, &self.plane.r_phi, &self.plane.psi)?;
        let f = overlap_probability(&out.state, &self.plane.phi)?;
        Ok(TrialRecord { n_reflections: out.reflections, success: fid_ok(f), final_fidelity: f, ..TrialRecord::new(id) })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let ns = n_of(rs);
        let n = estimate(ev, "n", &ns);
        let pt = 0.75 * self.p;
        mean_matches(ev, "mean_n_exact", &n, t_mean(pt, pt));
        mean_below(ev, "mean_n", &n, 4.0);
        moment(ev, "moment_7_4", &ns, 1.75, 6.0);
        every(ev, "ends_at_phi", rs, |r| r.success);
    }
}

struct Tx {
    p: f64,
    plane: Plane,
}

impl Experiment for Tx {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let out = transform_tx(s, &self.plane.r_psi, &self.plane.r_phi, &self.plane.psi)?;
        let f = overlap_probability(&out.state, &self.plane.phi)?;
        let fp = overlap_probability(&out.state, &self.plane.psi)?;
        let consistent = match out.flag {
            Some(Flag::One) => fid_ok(f),
            _ => fid_ok(fp),
        };
        let expected = if self.p > 0.5 {
            out.flag == Some(Flag::One)
        } else if self.p < 1.0 / 3.0 {
            out.flag == Some(Flag::Zero)
        } else {
            true
        };
        Ok(TrialRecord {
            n_reflections: out.reflections,
            success: consistent && expected,
            final_fidelity: f,
            extra: vec![(out.flag == Some(Flag::One)) as u8 as f64],
            ..TrialRecord::new(id)
        })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        estimate(ev, "n", &n_of(rs));
        estimate(ev, "flag_one", &extra(rs, 0));
        every(ev, "flag_matches_overlap_and_state", rs, |r| r.success);
    }
}

/// T'_x, or T'_mx when `suppressed`: two consecutive calls per trial.
struct TxPrime {
    p: f64,
    plane: Plane,
    suppressed: bool,
}

impl TxPrime {
    fn effective(&self) -> f64 {
        if self.suppressed {
            0.75 * self.p
        } else {
            self.p
        }
    }
}

impl Experiment for TxPrime {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let pl = &self.plane;
        let call = |s: &mut Session| {
            if self.suppressed {
                transform_tmx_prime(s, &pl.r_psi, &pl.r_phi, &pl.psi)
            } else {
                transform_tx_prime(s, &pl.r_psi, &pl.r_phi, &pl.psi)
            }
        };
        let first = call(s)?;
        let f = overlap_probability(&first.state, &pl.phi)?;
        let consistent = if first.success { fid_ok(f) } else { fid_ok(overlap_probability(&first.state, &pl.psi)?) };
        // a failed call leaves ψ, so the second call starts from ψ either way
        let second = call(s)?;
        Ok(TrialRecord {
            n_reflections: first.reflections,
            success: first.success,
            final_fidelity: f,
            extra: vec![second.reflections as f64, second.success as u8 as f64, consistent as u8 as f64],
            ..TrialRecord::new(id)
        })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let n = rs.len();
        let ns = n_of(rs);
        let m = estimate(ev, "n", &ns);
        let ok = rs.iter().filter(|r| r.success).count();
        let pe = self.effective();
        ev.aggregate("success_rate", ok as f64 / n as f64);
        let exact = tx_prime_success(pe);
        ev.bound("success_probability", exact);
        ev.verdict("success_probability", ok as f64 / n as f64, exact, rate_matches(ok, n, exact));
        if (0.25 - 1e-12..=0.75 + 1e-12).contains(&pe) {
            ev.bound("success_at_least", 0.95);
            ev.verdict("success_at_least", ok as f64 / n as f64, 0.95, rate_above(ok, n, 0.95));
            mean_below(ev, "mean_n", &m, 9.0);
        }
        let g = 8.0 / 7.0;
        let succ: Vec<f64> = rs.iter().filter(|r| r.success).map(|r| r.n_reflections as f64).collect();
        let fail: Vec<f64> = rs.iter().filter(|r| !r.success).map(|r| r.n_reflections as f64).collect();
        moment(ev, "moment_given_success", &succ, g, TX_PRIME_EXPONENT);
        moment(ev, "moment_given_failure", &fail, g, TX_PRIME_EXPONENT);
        let s1 = column(rs, |r| r.success as u8 as f64);
        uncorrelated(ev, "consecutive_n_correlation", &ns, &extra(rs, 0));
        uncorrelated(ev, "consecutive_outcome_correlation", &s1, &extra(rs, 1));
        every(ev, "state_matches_outcome", rs, |r| r.extra[2] == 1.0);
    }
}

struct Er {
    p: f64,
    gamma: f64,
    r: usize,
    gap: f64,
    spectrum: CopySpectrum,
}

impl Er {
    fn new(p: &Params) -> Result<Box<dyn Experiment>> {
        let e = Self {
            p: p.get("p"),
            gamma: p.get("gamma"),
            r: p.count("copies"),
            gap: p.get("gap"),
            spectrum: even_spectrum(&[PI, PI / 2.0]),
        };
        require(e.p > 0.5 + e.gamma, "ER needs p > 1/2 + gamma")?;
        Ok(Box::new(e))
    }
}

impl Experiment for Er {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let state = MultiCopyState::uniform(self.p, self.spectrum.clone(), self.r)?;
        let out = er_parallel(s, &state, self.gap)?;
        let truthful = out.labels.iter().enumerate().filter(|&(i, &l)| (out.copies.fidelity_with_phi(i) > 0.5) == l).count();
        Ok(TrialRecord {
            pe_calls: pe_charges(s),
            success: out.success,
            final_fidelity: truthful as f64 / self.r as f64,
            reported_phase_error: out.phase.map(|x| phase_distance(x, self.spectrum.target_phase)),
            extra: vec![out.j as f64],
            ..TrialRecord::new(id)
        })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let fails = rs.iter().filter(|r| !r.success).count();
        estimate(ev, "j", &extra(rs, 0));
        failure_rate(ev, "failure_rate", fails, rs.len(), (-2.0 * self.r as f64 * self.gamma * self.gamma).exp());
        let worst = rs.iter().filter(|r| r.success).filter_map(|r| r.reported_phase_error).fold(0.0, f64::max);
        ev.verdict("phase_error_on_success", worst, self.gap / 5.0, worst <= self.gap / 5.0 + 1e-12);
        every(ev, "pe_charges_2r", rs, |r| r.pe_calls == 2 * self.r as u64);
    }
}

struct Erx {
    p: f64,
    p_m: f64,
    gamma: f64,
    r: usize,
    gap: f64,
    resolution: f64,
    inner_mc: usize,
    spectrum: CopySpectrum,
    contract: ErxContract,
}

impl Erx {
    fn new(p: &Params) -> Result<Box<dyn Experiment>> {
        let (pp, p_m, gamma, res) = (p.get("p"), p.get("p_m"), p.get("gamma"), p.get("resolution"));
        require(p_m - 3.0 * gamma > 0.5 && p_m < 1.0, "ER_x needs p_m - 3 gamma > 1/2 and p_m < 1")?;
        let w = p.get("spurious");
        let rest = (1.0 - w) / 4.0;
        let spectrum = spectrum(&[(PI, w), (PI / 2.0, rest), (0.75 * PI, rest), (1.25 * PI, rest), (1.5 * PI, rest)]);
        let phases: Vec<f64> =
            std::iter::once(1.0).chain(spectrum.complement.iter().map(|c| c.0.unwrap())).collect();
        let weights: Vec<f64> = std::iter::once(pp).chain(spectrum.complement.iter().map(|c| (1.0 - pp) * c.1)).collect();
        require(dominance_holds(&phases, &weights, 1.0, p_m - 3.0 * gamma, res), "target is not dominant at p_m - 3 gamma")?;
        Ok(Box::new(Self {
            p: pp,
            p_m,
            gamma,
            r: p.count("copies"),
            gap: p.get("gap"),
            resolution: res,
            inner_mc: p.count("inner_mc"),
            spectrum,
            contract: ErxContract::for_overlap(pp, p_m, gamma),
        }))
    }
}

impl Experiment for Erx {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let state = MultiCopyState::uniform(self.p, self.spectrum.clone(), self.r)?;
        let out = er_x(s, &state, self.gap, self.resolution, self.p_m, self.gamma, self.inner_mc)?;
        Ok(TrialRecord {
            n_reflections: s.ledger.reflections,
            pe_calls: pe_charges(s),
            success: self.contract.holds(&out),
            final_fidelity: out.j as f64 / self.r as f64,
            extra: vec![out.b as u8 as f64, out.j as f64],
            ..TrialRecord::new(id)
        })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let branch = match self.contract {
            ErxContract::Above => 1.0,
            ErxContract::Below => 0.0,
            ErxContract::Between => 0.5,
        };
        ev.aggregate("branch", branch);
        estimate(ev, "b", &extra(rs, 0));
        estimate(ev, "j", &extra(rs, 1));
        let fails = rs.iter().filter(|r| !r.success).count();
        let a = 5.0 * (-(self.r as f64) * self.gamma * self.gamma).exp();
        failure_rate(ev, "contract_failure_rate", fails, rs.len(), a * a);
    }
}

struct Tp {
    p: f64,
    gamma: f64,
    r: usize,
    gap: f64,
    spectrum: CopySpectrum,
}

impl Tp {
    fn new(p: &Params) -> Result<Box<dyn Experiment>> {
        let e = Self {
            p: p.get("p"),
            gamma: p.get("gamma"),
            r: p.count("copies"),
            gap: p.get("gap"),
            spectrum: even_spectrum(&[PI, PI / 2.0]),
        };
        require(e.p > 4.0 / 3.0 * (0.5 + e.gamma), "T_p needs p > (4/3)(1/2 + gamma)")?;
        Ok(Box::new(e))
    }
}

impl Experiment for Tp {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let state = MultiCopyState::uniform(self.p, self.spectrum.clone(), self.r)?;
        let out = transform_tp(s, &state, self.gap)?;
        Ok(TrialRecord {
            n_reflections: out.reflections,
            pe_calls: pe_charges(s),
            success: out.success,
            final_fidelity: out.copies.mean_phi_fidelity(),
            reported_phase_error: out.reported_phase.map(|x| phase_distance(x, self.spectrum.target_phase)),
            extra: vec![out.t_instances as f64],
            ..TrialRecord::new(id)
        })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let ns = n_of(rs);
        let m = estimate(ev, "n", &ns);
        estimate(ev, "t_instances", &extra(rs, 0));
        let r = self.r as f64;
        let fails = rs.iter().filter(|x| !x.success).count();
        failure_rate(ev, "failure_rate", fails, rs.len(), (-2.0 * r * self.gamma * self.gamma).exp());
        mean_below(ev, "mean_n", &m, 2.0 * r);
        moment(ev, "moment_7_4", &ns, 1.75, 3.0 * r);
        let worst = rs.iter().filter(|x| x.success).filter_map(|x| x.reported_phase_error).fold(0.0, f64::max);
        ev.verdict("phase_error_on_success", worst, self.gap / 5.0, worst <= self.gap / 5.0 + 1e-12);
        every(ev, "pe_charges_at_most_2r_each_way", rs, |x| x.pe_calls <= 4 * self.r as u64);
    }
}

struct Tpx {
    p: f64,
    gamma: f64,
    r: usize,
    gap: f64,
    resolution: f64,
    inner_mc: usize,
    spectrum: CopySpectrum,
    expected: Option<Flag>,
}

impl Tpx {
    fn new(p: &Params) -> Result<Box<dyn Experiment>> {
        let (pp, gamma, res) = (p.get("p"), p.get("gamma"), p.get("resolution"));
        let spectrum = even_spectrum(&[PI / 2.0, 0.75 * PI, PI, 1.25 * PI, 1.5 * PI]);
        let phases: Vec<f64> =
            std::iter::once(1.0).chain(spectrum.complement.iter().map(|c| c.0.unwrap())).collect();
        let weights: Vec<f64> = std::iter::once(pp).chain(spectrum.complement.iter().map(|c| (1.0 - pp) * c.1)).collect();
        require(dominance_holds(&phases, &weights, 1.0, 1.0 - 4.0 * gamma, res), "target is not dominant at 1 - 4 gamma")?;
        let expected = if pp > 1.0 - gamma {
            Some(Flag::One)
        } else if pp <= 1.0 - 3.0 * gamma {
            Some(Flag::Hash)
        } else {
            None
        };
        Ok(Box::new(Self {
            p: pp,
            gamma,
            r: p.count("copies"),
            gap: p.get("gap"),
            resolution: res,
            inner_mc: p.count("inner_mc"),
            spectrum,
            expected,
        }))
    }
}

impl Experiment for Tpx {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let state = MultiCopyState::uniform(self.p, self.spectrum.clone(), self.r)?;
        let out = transform_tpx(s, &state, self.gap, self.resolution, self.gamma, self.inner_mc)?;
        let ok = out.success && self.expected.map_or(true, |f| out.flag == Some(f));
        Ok(TrialRecord {
            n_reflections: out.reflections,
            pe_calls: pe_charges(s),
            success: ok,
            final_fidelity: out.copies.mean_phi_fidelity(),
            reported_phase_error: out.reported_phase.map(|x| phase_distance(x, self.spectrum.target_phase)),
            extra: vec![(out.flag == Some(Flag::Hash)) as u8 as f64],
            ..TrialRecord::new(id)
        })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let r = self.r as f64;
        let m = estimate(ev, "n", &n_of(rs));
        estimate(ev, "flag_hash", &extra(rs, 0));
        ev.aggregate("dominance_margin_condition", (1.0 - 4.0 * self.gamma > 2.0 / 3.0) as u8 as f64);
        mean_below(ev, "mean_n", &m, 5.0 * r);
        if let Some(f) = self.expected {
            ev.aggregate("expected_flag_hash", (f == Flag::Hash) as u8 as f64);
            let fails = rs.iter().filter(|x| !x.success).count();
            let a = 6.0 * (-r * self.gamma * self.gamma / 36.0).exp();
            failure_rate(ev, "failure_rate", fails, rs.len(), a * a);
        }
        let worst = rs.iter().filter(|x| x.success).filter_map(|x| x.reported_phase_error).fold(0.0, f64::max);
        ev.verdict("phase_error_on_success", worst, self.gap / 5.0, worst <= self.gap / 5.0 + 1e-12);
        every(ev, "pe_charges_at_most_4r", rs, |x| x.pe_calls <= 4 * self.r as u64);
    }
}

struct Known {
    path: Arc<dyn EigenPath>,
    cps: Checkpoints,
}

impl Known {
    fn new(p: &Params, path: Option<&PathSpec>) -> Result<Box<dyn Experiment>> {
        let path = path_or(path, || Ok(Arc::new(grover_path(16)?)))?;
        let cps = Checkpoints::greedy(path.as_ref(), p.get("min_overlap"), p.count("grid"))?;
        let offset = p.get("anchor_offset");
        let anchors = cps.clone().with_exact_anchors(path.as_ref())?.anchors().unwrap().iter().map(|a| a + offset).collect();
        let cps = cps.with_anchors(anchors)?;
        // preconditions checked once on a throwaway session
        traverse_known(&mut Session::seeded(OracleConfig::default(), 0, u64::MAX), path.as_ref(), &cps, true)?;
        Ok(Box::new(Self { path, cps }))
    }
}

impl Experiment for Known {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let rep = traverse_known(s, self.path.as_ref(), &self.cps, false)?;
        Ok(TrialRecord { extra: vec![rep.ledger.oracle_calls() as f64], ..with_report(id, &rep) })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let n = self.cps.segments() as f64;
        ev.aggregate("segments", n);
        ev.aggregate("min_segment_overlap", self.cps.overlaps().unwrap().iter().copied().fold(1.0, f64::min));
        let ms = n_of(rs);
        let m = estimate(ev, "m", &ms);
        estimate(ev, "oracle_calls", &extra(rs, 0));
        every(ev, "final_fidelity_one", rs, |r| r.success && fid_ok(r.final_fidelity));
        mean_below(ev, "mean_m", &m, 4.0 * n);
        moment(ev, "moment_7_4", &ms, 1.75, 6.0 * n);
    }
}

struct Parallel {
    path: Arc<dyn EigenPath>,
    cps: Checkpoints,
    gamma: f64,
    r: usize,
}

impl Parallel {
    fn new(p: &Params, path: Option<&PathSpec>) -> Result<Box<dyn Experiment>> {
        let gamma = p.get("gamma");
        let need = 4.0 / 3.0 * (0.5 + gamma);
        let (path, cps) = match path {
            Some(spec) => {
                let path = spec.build()?;
                let cps = Checkpoints::greedy(path.as_ref(), (need + 0.01).min(1.0), 400)?;
                (path, cps)
            }
            None => {
                let n = p.count("segments");
                let len = n as f64 * p.get("p").sqrt().acos();
                let path: Arc<dyn EigenPath> = Arc::new(PlanarPath::great_circle(4, len)?);
                let mut cps = Checkpoints::uniform(n)?;
                cps.fill_overlaps(path.as_ref())?;
                (path, cps)
            }
        };
        let worst = cps.overlaps().unwrap().iter().copied().fold(1.0, f64::min);
        require(worst > need, "segment overlaps must exceed (4/3)(1/2 + gamma)")?;
        Ok(Box::new(Self { path, cps, gamma, r: p.count("copies") }))
    }
}

fn anchor_error(path: &dyn EigenPath, anchors: &[(f64, f64)]) -> Result<Option<f64>> {
    let mut worst: Option<f64> = None;
    for &(s, ph) in anchors {
        let e = phase_distance(ph, path.target(s)?.phase);
        worst = Some(worst.map_or(e, |w| w.max(e)));
    }
    Ok(worst)
}

impl Experiment for Parallel {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let rep = traverse_parallel(s, self.path.as_ref(), &self.cps, self.r)?;
        let err = anchor_error(self.path.as_ref(), &rep.anchors)?;
        Ok(TrialRecord { reported_phase_error: err, extra: vec![rep.anchors.len() as f64], ..with_report(id, &rep) })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let n = self.cps.segments() as f64;
        let r = self.r as f64;
        ev.aggregate("segments", n);
        estimate(ev, "n", &n_of(rs));
        let fails = rs.iter().filter(|x| !x.success).count();
        let a = n * (-r * self.gamma * self.gamma).exp();
        failure_rate(ev, "failure_rate", fails, rs.len(), a * a);
        let delta = self.path.gap_lower_bound();
        let worst = rs.iter().filter(|x| x.success).filter_map(|x| x.reported_phase_error).fold(0.0, f64::max);
        ev.verdict("anchor_error_on_success", worst, delta / 5.0, worst <= delta / 5.0 + 1e-12);
        every(ev, "anchors_for_every_checkpoint", rs, |x| !x.success || x.extra[0] == n);
        every(ev, "pe_charges_at_most_4nr", rs, |x| x.pe_calls as f64 <= 4.0 * n * r);
    }
}

struct Dominant {
    path: Arc<dyn EigenPath>,
    params: DominantParams,
    c_bound: f64,
}

impl Dominant {
    fn new(p: &Params, path: Option<&PathSpec>) -> Result<Box<dyn Experiment>> {
        let gamma = p.get("gamma");
        let theta = 0.999 * (1.0 - gamma).sqrt().acos();
        let path = path_or(path, || {
            Ok(Arc::new(PlanarPath::great_circle(p.count("dim"), p.get("length_over_theta") * theta)?))
        })?;
        let g = velocity_profile(path.as_ref(), theta)?;
        let c_bound = 2.0 * g.length * (g.speed_ratio_log2() + 3.0) / theta + 1.0;
        let params = DominantParams {
            resolution: p.get("resolution"),
            gamma,
            copies: p.count("copies"),
            inner_mc: p.count("inner_mc"),
            depth_cap: DEPTH_CAP,
        };
        Ok(Box::new(Self { path, params, c_bound }))
    }
}

impl Experiment for Dominant {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let rep = traverse_recursive_dominant(s, self.path.as_ref(), &self.params)?;
        let err = anchor_error(self.path.as_ref(), &rep.anchors)?;
        Ok(TrialRecord { reported_phase_error: err, extra: vec![rep.attempts() as f64], ..with_report(id, &rep) })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let r = self.params.copies as f64;
        let c = self.c_bound;
        ev.bound("attempt_bound", c);
        let att = extra(rs, 0);
        estimate(ev, "attempts", &att);
        let most = att.iter().copied().fold(0.0, f64::max);
        ev.verdict("attempts_at_most_c", most, c, most <= c);
        let m = estimate(ev, "n", &n_of(rs));
        mean_below(ev, "mean_n", &m, 5.0 * r * c);
        let fails = rs.iter().filter(|x| !x.success).count();
        let a = 6.0 * c * (-r * self.params.gamma * self.params.gamma / 36.0).exp();
        failure_rate(ev, "failure_rate", fails, rs.len(), a * a);
        let delta = self.path.gap_lower_bound();
        let worst = rs.iter().filter(|x| x.success).filter_map(|x| x.reported_phase_error).fold(0.0, f64::max);
        ev.verdict("anchor_error_on_success", worst, delta / 5.0, worst <= delta / 5.0 + 1e-12);
        every(ev, "pe_charges_at_most_4rc", rs, |x| x.pe_calls as f64 <= 4.0 * r * c);
    }
}

struct OverlapFree {
    path: Arc<dyn EigenPath>,
    offset: f64,
    n_bar: f64,
}

/// Each subdivided interval's parent failed: in depth-first order the parent is
/// the latest earlier record one level up.
fn monotone_refinement(rep: &TraversalReport) -> bool {
    rep.intervals.iter().enumerate().all(|(i, rec)| {
        rec.depth == 0
            || rep.intervals[..i].iter().rev().find(|p| p.depth + 1 == rec.depth).is_some_and(|p| !p.success)
    })
}

impl OverlapFree {
    fn new(p: &Params, path: Option<&PathSpec>) -> Result<Box<dyn Experiment>> {
        let path = path_or(path, || Ok(Arc::new(PlanarPath::great_circle(p.count("dim"), p.get("length"))?)))?;
        let offset = p.get("anchor_offset");
        require(offset.abs() <= path.gap_lower_bound() / 4.0, "anchor offset exceeds gap/4")?;
        let theta = (1.0f64 / 3.0).sqrt().acos();
        let g = velocity_profile(path.as_ref(), theta)?;
        let n_bar = 40.0 * g.length * (g.speed_ratio_log2() + 3.0) / theta + 10.0;
        Ok(Box::new(Self { path, offset, n_bar }))
    }
}

impl Experiment for OverlapFree {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let rep = traverse_recursive_overlap_free(s, self.path.as_ref(), self.offset, DEPTH_CAP)?;
        let mono = monotone_refinement(&rep);
        let rec = with_report(id, &rep);
        Ok(TrialRecord { success: rec.success && mono, extra: vec![rep.attempts() as f64], ..rec })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        ev.bound("n_bar", self.n_bar);
        let ns = n_of(rs);
        let m = estimate(ev, "n", &ns);
        estimate(ev, "attempts", &extra(rs, 0));
        every(ev, "reaches_end_with_monotone_refinement", rs, |r| r.success);
        mean_below(ev, "mean_n", &m, self.n_bar);
        moment(ev, "moment_14_13", &ns, 14.0 / 13.0, 36.0 * self.n_bar);
    }
}

struct Reduce {
    path: PlanarPath,
    trace: Vec<f64>,
    theta: f64,
    lo: f64,
    hi: f64,
}

impl Reduce {
    fn new(p: &Params) -> Result<Box<dyn Experiment>> {
        let path = PlanarPath::great_circle(3, p.get("length"))?;
        let trace = Checkpoints::uniform(p.count("steps"))?.s().to_vec();
        Ok(Box::new(Self { path, trace, theta: p.get("theta"), lo: p.get("theta_lo"), hi: p.get("theta_hi") }))
    }
}

impl Experiment for Reduce {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let red = reduce_checkpoints(s, &self.path, &self.trace, self.theta, self.lo, self.hi)?;
        let pts = red.checkpoints.s();
        let k = pts.len() - 1;
        let mut gaps = Vec::with_capacity(k);
        for w in pts.windows(2) {
            gaps.push(angular_distance(&self.path.state(w[0])?, &self.path.state(w[1])?)?);
        }
        let upper = gaps.iter().all(|&g| g <= self.hi + self.theta + 1e-9);
        let lower = gaps[..k - 1].iter().all(|&g| g >= self.lo - 1e-9);
        let total: f64 = gaps.iter().sum();
        let length_ok = total >= self.lo * (k as f64 - 1.0) - 1e-9;
        Ok(TrialRecord {
            n_reflections: red.reflections,
            success: upper && lower && length_ok,
            extra: vec![k as f64, total, red.ov_calls as f64, red.t_invocations as f64],
            ..TrialRecord::new(id)
        })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        estimate(ev, "k", &extra(rs, 0));
        estimate(ev, "output_length", &extra(rs, 1));
        estimate(ev, "t_invocations", &extra(rs, 3));
        every(ev, "gap_and_length_bounds", rs, |r| r.success);
        let steps = (self.trace.len() - 1) as f64;
        every(ev, "overlap_calls_per_step", rs, |r| r.extra[2] == steps - 1.0);
    }
}

struct Gw {
    p_s: f64,
}

impl Experiment for Gw {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let g = galton_watson_size(self.p_s, &mut s.rng)?;
        Ok(TrialRecord { n_reflections: g.size, pe_calls: g.leaves, ..TrialRecord::new(id) })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let size = n_of(rs);
        let leaves = column(rs, |r| r.pe_calls as f64);
        let l = estimate(ev, "leaves", &leaves);
        let t = estimate(ev, "size", &size);
        if let (Ok(ml), Ok(mt)) = (gw_mean(self.p_s), gw_total_mean(self.p_s)) {
            mean_matches(ev, "mean_successful_intervals", &l, ml);
            mean_matches(ev, "mean_total_intervals", &t, mt);
        }
        if let Ok(g) = gw_gamma_max(self.p_s) {
            let g = if g.is_finite() { g } else { 2.0 };
            ev.aggregate("gamma", g);
            let exponent = gw_gamma_bound(self.p_s, g).map(|b| b.ln() / g.ln()).unwrap_or(f64::NAN);
            moment(ev, "moment_at_gamma_max", &size, g, exponent);
        }
        every(ev, "size_is_2_leaves_minus_1", rs, |r| r.n_reflections + 1 == 2 * r.pe_calls);
    }
}

struct Speed {
    theta: f64,
    points: usize,
    profiles: Vec<SpeedProfile>,
}

impl Speed {
    fn new(p: &Params) -> Result<Box<dyn Experiment>> {
        let th = p.get("theta");
        let profiles = vec![
            SpeedProfile::uniform(10.0 * th),
            SpeedProfile::new(vec![0.0, 0.5, 1.0], vec![16.0 * th, 4.0 * th])?,
            SpeedProfile::new(vec![0.0, 0.25, 0.5, 0.75, 1.0], vec![4.0 * th, 40.0 * th, 2.0 * th, 10.0 * th])?,
        ];
        Ok(Box::new(Self { theta: th, points: p.count("points"), profiles }))
    }
}

impl Experiment for Speed {
    fn trial(&self, _s: &mut Session, id: u64) -> Result<TrialRecord> {
        let prof = &self.profiles[id as usize % self.profiles.len()];
        let th = self.theta;
        let len = prof.total();
        let mut violations = 0;
        for j in 0..self.points {
            let l = len * (j as f64 + 0.5) / self.points as f64;
            if sigma_theta(prof, l, (0.0, 1.0), th) > 2.0 * rho_theta(prof, l, (0.0, 1.0), th) + 1e-9 {
                violations += 1;
            }
        }
        let enumerated = bit_cost_enumerated(prof, th, (0.0, 1.0), 1.0, DEPTH_CAP)?;
        let integral = bit_cost_bound(prof, th, (0.0, 1.0), |_| 1.0);
        let rough = bit_cost_rough(prof, th, 1.0);
        let chain = enumerated <= integral + 1e-9 && integral <= rough + 1e-9;
        Ok(TrialRecord {
            success: violations == 0 && chain,
            extra: vec![violations as f64, enumerated, integral, rough],
            ..TrialRecord::new(id)
        })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        every(ev, "sigma_at_most_twice_rho", rs, |r| r.extra[0] == 0.0);
        every(ev, "enumerated_le_integral_le_rough", rs, |r| r.extra[1] <= r.extra[2] + 1e-9 && r.extra[2] <= r.extra[3] + 1e-9);
        for r in rs.iter().take(self.profiles.len()) {
            let k = r.trial_id;
            ev.aggregate(&format!("profile_{k}_enumerated"), r.extra[1]);
            ev.aggregate(&format!("profile_{k}_integral"), r.extra[2]);
            ev.aggregate(&format!("profile_{k}_rough"), r.extra[3]);
        }
        let rough = bit_cost_rough(&SpeedProfile::uniform(10.0 * self.theta), self.theta, 1.0);
        ev.verdict("uniform_rough_bound_is_60", rough, 60.0, (rough - 60.0).abs() < 1e-9);
    }
}

struct Perturb {
    dim: usize,
    level: usize,
    scale: f64,
    items: usize,
    grover: HamiltonianPath,
    points: usize,
    slack: f64,
}

impl Perturb {
    fn new(p: &Params) -> Result<Box<dyn Experiment>> {
        let (dim, level) = (p.count("dim"), p.count("level"));
        require(level < dim, "level must be below the dimension")?;
        let items = p.count("grover_items");
        Ok(Box::new(Self {
            dim,
            level,
            scale: p.get("scale"),
            items,
            grover: grover_path(items)?,
            points: p.count("grover_points"),
            slack: p.get("slack"),
        }))
    }
}

impl Experiment for Perturb {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let (exact, bound) = random_angle_instance(self.dim, self.level, self.scale, &mut s.rng)?;
        let (lhs, rhs) = if (id as usize) < self.points {
            let t = (id as f64 + 0.5) / self.points as f64;
            let lhs = projected_rate(&self.grover, t)?;
            (lhs, rate_bound(|x| self.grover.hamiltonian(x), t, grover_gap(self.items, t))?)
        } else {
            (f64::NAN, f64::NAN)
        };
        Ok(TrialRecord {
            success: exact <= bound + 1e-10 && !(lhs > rhs + self.slack),
            extra: vec![exact, bound, lhs, rhs],
            ..TrialRecord::new(id)
        })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        every(ev, "angle_within_bound", rs, |r| r.extra[0] <= r.extra[1] + 1e-10);
        let rated: Vec<&TrialRecord> = rs.iter().filter(|r| !r.extra[2].is_nan()).collect();
        let good = rated.iter().filter(|r| r.extra[2] <= r.extra[3] + self.slack).count();
        ev.verdict("rate_within_bound", good as f64, rated.len() as f64, good == rated.len());
        let tight = rs.iter().map(|r| r.extra[0] / r.extra[1]).filter(|x| x.is_finite()).fold(0.0, f64::max);
        ev.aggregate("max_angle_over_bound", tight);
    }
}

struct Compose {
    plane: Plane,
    steps: usize,
}

impl Experiment for Compose {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let mut per = Vec::with_capacity(self.steps);
        for _ in 0..self.steps {
            per.push(transform_tm(s, &self.plane.r_psi, &self.plane.r_phi, &self.plane.psi)?.reflections as f64);
        }
        Ok(TrialRecord { n_reflections: per.iter().sum::<f64>() as u64, extra: per, ..TrialRecord::new(id) })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let totals = n_of(rs);
        estimate(ev, "total", &totals);
        let per_step = vec![6.0; self.steps];
        let rep = verify_ldev_composition(&per_step, &totals, &[1.25, 1.5, 1.75]);
        for c in &rep.checks {
            ev.bound(&format!("log_bound_gamma_{}", c.gamma), c.log_bound);
            ev.verdict(
                &format!("composed_moment_gamma_{}", c.gamma),
                c.log_moment,
                c.log_bound + (1.0 + SIGMA_SLACK * c.rel_se).ln(),
                c.pass,
            );
        }
    }
}

struct RandomCount {
    p_s: f64,
    idle: f64,
}

impl Experiment for RandomCount {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let x = random_count_sample(overlap_for_success(self.p_s), self.idle, &mut s.rng)?;
        Ok(TrialRecord { n_reflections: x.cost, pe_calls: x.m, extra: vec![x.idle as f64], ..TrialRecord::new(id) })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let costs = n_of(rs);
        let counts = column(rs, |r| r.pe_calls as f64);
        estimate(ev, "cost", &costs);
        estimate(ev, "m", &counts);
        estimate(ev, "idle", &extra(rs, 0));
        let Ok((m_tilde, limit)) = random_count_exponents(self.p_s) else { return };
        ev.bound("m_tilde", m_tilde);
        ev.bound("gamma_limit", limit);
        for (i, g) in [1.0 + 0.5 * (limit - 1.0), limit].into_iter().enumerate() {
            moment(ev, &format!("cost_moment_{i}"), &costs, g, m_tilde * TX_PRIME_EXPONENT);
            moment(ev, &format!("count_moment_{i}"), &counts, g.powf(TX_PRIME_EXPONENT), m_tilde);
        }
    }
}

struct CostRatio {
    path: PlanarPath,
    cps: Checkpoints,
    r: usize,
    factor: f64,
}

impl CostRatio {
    fn new(p: &Params) -> Result<Box<dyn Experiment>> {
        let n = p.count("segments");
        let path = PlanarPath::great_circle(4, n as f64 * p.get("p").sqrt().acos())?;
        let cps = Checkpoints::uniform(n)?.with_exact_anchors(&path)?;
        Ok(Box::new(Self { path, cps, r: p.count("copies"), factor: p.get("factor") }))
    }
}

impl Experiment for CostRatio {
    fn trial(&self, s: &mut Session, id: u64) -> Result<TrialRecord> {
        let known = traverse_known(s, &self.path, &self.cps, false)?;
        let par = traverse_parallel(s, &self.path, &self.cps, self.r)?;
        let per_copy = par.ledger.oracle_calls() as f64 / self.r as f64;
        Ok(TrialRecord {
            n_reflections: known.reflections,
            pe_calls: par.ledger.pe_calls + par.ledger.pe_reversals,
            success: known.success && par.success,
            final_fidelity: known.final_fidelity,
            extra: vec![known.ledger.oracle_calls() as f64, per_copy],
            ..TrialRecord::new(id)
        })
    }

    fn evaluate(&self, rs: &[TrialRecord], ev: &mut Evaluation) {
        let a = estimate(ev, "known_oracle_calls", &extra(rs, 0));
        let b = estimate(ev, "parallel_oracle_calls_per_copy", &extra(rs, 1));
        let ratio = b.mean / a.mean;
        ev.aggregate("ratio", ratio);
        ev.bound("factor", self.factor);
        let spread = ratio.max(1.0 / ratio);
        ev.verdict("per_copy_ratio_within_factor", spread, self.factor, spread <= self.factor);
    }
}
