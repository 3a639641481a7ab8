use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use super::{anchored_reflection, angle_between, Checkpoints, IntervalRecord, TraversalReport};
use crate::error::{Error, Result};
use crate::onestep::{transform_t, transform_tm, transform_tp, MultiCopyState};
use crate::oracles::{ov, Reflection, Session};
use crate::quantum::{overlap_probability, EigenPath};

const FIDELITY_TOL: f64 = 1e-9;

fn anchors_for<P: EigenPath + ?Sized>(path: &P, cps: &Checkpoints) -> Result<Vec<f64>> {
    match cps.anchors() {
        Some(a) => Ok(a.to_vec()),
        None => cps.s().iter().map(|&s| Ok(path.target(s)?.phase)).collect(),
    }
}

/// Known checkpoints with p ≥ 1/3 and anchors within Δ/4: T_m per segment.
/// With `diagnostic` the preconditions are checked against the true path.
pub fn traverse_known<R: Rng, P: EigenPath + ?Sized>(
    s: &mut Session<R>,
    path: &P,
    cps: &Checkpoints,
    diagnostic: bool,
) -> Result<TraversalReport> {
    let delta = path.gap_lower_bound();
    let anchors = anchors_for(path, cps)?;
    if diagnostic {
        if let Some(err) = cps.clone().with_anchors(anchors.clone())?.anchor_error(path)? {
            if err > delta / 4.0 + 1e-12 {
                return Err(Error::Precondition(format!("anchor off by {err:.4} > Δ/4")));
            }
        }
        let mut c = cps.clone();
        c.fill_overlaps(path)?;
        if let Some(p) = c.overlaps().unwrap().iter().find(|&&p| p < 1.0 / 3.0 - 1e-12) {
            return Err(Error::Precondition(format!("segment overlap {p:.4} < 1/3")));
        }
    }
    let before = s.ledger.clone();
    let mut rep = TraversalReport::new();
    let (op, t) = path.snapshot(0.0)?;
    let mut state = t.state;
    let mut r_prev = anchored_reflection(&op, anchors[0], delta)?;
    let pts = cps.s();
    for k in 0..cps.segments() {
        let (op, t) = path.snapshot(pts[k + 1])?;
        let r_next = anchored_reflection(&op, anchors[k + 1], delta)?;
        let led = s.ledger.clone();
        let angle = angle_between(&state, &t.state)?;
        let out = transform_tm(s, &r_prev, &r_next, &state)?;
        let ok = overlap_probability(&out.state, &t.state)? >= 1.0 - FIDELITY_TOL;
        rep.push(IntervalRecord {
            c: pts[k],
            d: pts[k + 1],
            depth: 0,
            angle,
            reflections: out.reflections,
            pe_calls: s.ledger.since(&led).pe_calls,
            success: ok,
            flag: None,
        });
        state = out.state;
        r_prev = r_next;
    }
    rep.final_fidelity = overlap_probability(&state, &path.state(1.0)?)?;
    rep.success = rep.final_fidelity >= 1.0 - FIDELITY_TOL;
    rep.ledger = s.ledger.since(&before);
    Ok(rep)
}

/// r copies moved along the checkpoints with T_p; each step reports an anchor.
/// Stops at the first failed step.
pub fn traverse_parallel<R: Rng, P: EigenPath + ?Sized>(
    s: &mut Session<R>,
    path: &P,
    cps: &Checkpoints,
    r: usize,
) -> Result<TraversalReport> {
    let delta = path.gap_lower_bound();
    let before = s.ledger.clone();
    let mut rep = TraversalReport::new();
    let pts = cps.s();
    let mut fid = 1.0;
    for k in 0..cps.segments() {
        let psi = path.state(pts[k])?;
        let (op, t) = path.snapshot(pts[k + 1])?;
        let copies = MultiCopyState::from_instance(&op, t.index, &psi, r)?;
        let out = transform_tp(s, &copies, delta)?;
        rep.push(IntervalRecord {
            c: pts[k],
            d: pts[k + 1],
            depth: 0,
            angle: angle_between(&psi, &t.state)?,
            reflections: out.reflections,
            pe_calls: out.pe_calls,
            success: out.success,
            flag: None,
        });
        fid = out.copies.mean_phi_fidelity();
        if let Some(ph) = out.reported_phase {
            rep.anchors.push((pts[k + 1], ph));
        }
        if !out.success {
            break;
        }
    }
    rep.success = rep.intervals.len() == cps.segments() && rep.intervals.iter().all(|r| r.success);
    // copies that stopped short of s = 1 have not reached ψ₁
    rep.final_fidelity = if rep.intervals.len() == cps.segments() { fid } else { 0.0 };
    rep.ledger = s.ledger.since(&before);
    Ok(rep)
}

/// Output of the checkpoint reduction.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub checkpoints: Checkpoints,
    pub ov_calls: u64,
    pub reflections: u64,
    pub t_invocations: u64,
}

/// Thins a trace 0 = t₀ < … < t_n = 1 (steps with angle < θ) to checkpoints whose
/// consecutive angles lie in [θ̲, θ̄ + θ], the last gap only bounded above.
pub fn reduce_checkpoints<R: Rng, P: EigenPath + ?Sized>(
    s: &mut Session<R>,
    path: &P,
    trace: &[f64],
    theta: f64,
    theta_lo: f64,
    theta_hi: f64,
) -> Result<Reduction> {
    if !(0.0 < theta_lo && theta_lo < theta_hi && theta_hi < theta_lo + theta && theta_lo + theta < FRAC_PI_2) {
        return Err(Error::Precondition("need θ̲ < θ̄ < θ̲ + θ < π/2".into()));
    }
    let trace_cp = Checkpoints::new(trace.to_vec())?;
    let states: Vec<_> = trace.iter().map(|&t| path.state(t)).collect::<Result<_>>()?;
    for w in states.windows(2) {
        let a = angle_between(&w[0], &w[1])?;
        if a >= theta {
            return Err(Error::Precondition(format!("trace step angle {a:.4} ≥ θ")));
        }
    }
    let before = s.ledger.clone();
    let n = trace_cp.segments();
    let mut out = vec![0.0];
    let mut last = 0usize;
    let mut t_invocations = 0;
    let (alpha, res) = ((theta_hi + theta_lo) / 2.0, (theta_hi - theta_lo) / 2.0);
    for l in 1..n {
        let r_t = Reflection::about(&states[l]);
        let r_s = Reflection::about(&states[last]);
        let (b, y) = ov(s, &r_t, &r_s, alpha, res, &states[l])?;
        let (kept, z) = s.measure_reflection(&r_t, &y)?;
        // b = 1 certifies a small angle; otherwise the angle is at least θ̲
        if !kept || !b {
            out.push(trace[l]);
            last = l;
        }
        if !kept {
            transform_t(s, &r_s, &r_t, &z)?;
            t_invocations += 1;
        }
    }
    out.push(1.0);
    let mut checkpoints = Checkpoints::new(out)?;
    checkpoints.fill_overlaps(path)?;
    let d = s.ledger.since(&before);
    Ok(Reduction { checkpoints, ov_calls: d.ov_calls, reflections: d.reflections, t_invocations })
}
