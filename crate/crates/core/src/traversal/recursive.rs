use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{anchored_reflection, angle_between, IntervalRecord, TraversalReport, DEPTH_CAP};
use crate::error::{Error, Result};
use crate::onestep::{transform_tmx_prime, transform_tpx, Flag, MultiCopyState};
use crate::oracles::Session;
use crate::quantum::{overlap_probability, EigenPath, StateVector};

/// Parameters of the multi-copy recursive traversal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominantParams {
    /// Dominance resolution δ.
    pub resolution: f64,
    pub gamma: f64,
    pub copies: usize,
    /// Resamples used to model the ER_x post-measurement state.
    pub inner_mc: usize,
    pub depth_cap: usize,
}

impl Default for DominantParams {
    fn default() -> Self {
        Self { resolution: 0.1, gamma: 0.05, copies: 30, inner_mc: 64, depth_cap: DEPTH_CAP }
    }
}

struct Dominant<'a, P: ?Sized> {
    path: &'a P,
    params: &'a DominantParams,
    delta: f64,
}

impl<P: EigenPath + ?Sized> Dominant<'_, P> {
    /// False once an attempt has failed outright.
    fn descend<R: Rng>(&self, s: &mut Session<R>, c: f64, d: f64, depth: usize, rep: &mut TraversalReport) -> Result<bool> {
        if depth > self.params.depth_cap {
            return Err(Error::DepthCap { cap: self.params.depth_cap });
        }
        let psi = self.path.state(c)?;
        let (op, t) = self.path.snapshot(d)?;
        let copies = MultiCopyState::from_instance(&op, t.index, &psi, self.params.copies)?;
        let p = &self.params;
        let out = transform_tpx(s, &copies, self.delta, p.resolution, p.gamma, p.inner_mc)?;
        rep.push(IntervalRecord {
            c,
            d,
            depth,
            angle: angle_between(&psi, &t.state)?,
            reflections: out.reflections,
            pe_calls: out.pe_calls,
            success: out.success,
            flag: out.flag,
        });
        if !out.success {
            return Ok(false);
        }
        if out.flag == Some(Flag::Hash) {
            let m = 0.5 * (c + d);
            return Ok(self.descend(s, c, m, depth + 1, rep)? && self.descend(s, m, d, depth + 1, rep)?);
        }
        if let Some(ph) = out.reported_phase {
            rep.anchors.push((d, ph));
        }
        rep.final_fidelity = out.copies.mean_phi_fidelity();
        Ok(true)
    }
}

/// r copies moved along the path by recursive T_px over the binary interval tree,
/// stopping at intervals where the transformation goes through.
pub fn traverse_recursive_dominant<R: Rng, P: EigenPath + ?Sized>(
    s: &mut Session<R>,
    path: &P,
    params: &DominantParams,
) -> Result<TraversalReport> {
    let before = s.ledger.clone();
    let mut rep = TraversalReport::new();
    let walker = Dominant { path, params, delta: path.gap_lower_bound() };
    let done = walker.descend(s, 0.0, 1.0, 0, &mut rep)?;
    if !done {
        rep.final_fidelity = 0.0;
    }
    rep.success = done && rep.final_fidelity >= 1.0 - 1e-9;
    rep.ledger = s.ledger.since(&before);
    Ok(rep)
}

struct OverlapFree<'a, P: ?Sized> {
    path: &'a P,
    offset: f64,
    delta: f64,
    depth_cap: usize,
}

impl<P: EigenPath + ?Sized> OverlapFree<'_, P> {
    fn descend<R: Rng>(
        &self,
        s: &mut Session<R>,
        c: f64,
        d: f64,
        depth: usize,
        state: StateVector,
        rep: &mut TraversalReport,
    ) -> Result<StateVector> {
        if depth > self.depth_cap {
            return Err(Error::DepthCap { cap: self.depth_cap });
        }
        let (op_c, t_c) = self.path.snapshot(c)?;
        let (op_d, t_d) = self.path.snapshot(d)?;
        let r_c = anchored_reflection(&op_c, t_c.phase + self.offset, self.delta)?;
        let r_d = anchored_reflection(&op_d, t_d.phase + self.offset, self.delta)?;
        let led = s.ledger.clone();
        let out = transform_tmx_prime(s, &r_c, &r_d, &state)?;
        rep.push(IntervalRecord {
            c,
            d,
            depth,
            angle: angle_between(&t_c.state, &t_d.state)?,
            reflections: out.reflections,
            pe_calls: s.ledger.since(&led).pe_calls,
            success: out.success,
            flag: out.flag,
        });
        if out.success {
            return Ok(out.state);
        }
        let m = 0.5 * (c + d);
        let mid = self.descend(s, c, m, depth + 1, out.state, rep)?;
        self.descend(s, m, d, depth + 1, mid, rep)
    }
}

/// Single copy moved along the path by recursive T'_mx, subdividing on failure.
/// Anchors are the true eigenphases shifted by `anchor_offset`, at most Δ/4.
pub fn traverse_recursive_overlap_free<R: Rng, P: EigenPath + ?Sized>(
    s: &mut Session<R>,
    path: &P,
    anchor_offset: f64,
    depth_cap: usize,
) -> Result<TraversalReport> {
    let delta = path.gap_lower_bound();
    if anchor_offset.abs() > delta / 4.0 {
        return Err(Error::Precondition(format!("anchor offset {anchor_offset} exceeds Δ/4")));
    }
    let before = s.ledger.clone();
    let mut rep = TraversalReport::new();
    let walker = OverlapFree { path, offset: anchor_offset, delta, depth_cap };
    let end = walker.descend(s, 0.0, 1.0, 0, path.state(0.0)?, &mut rep)?;
    rep.final_fidelity = overlap_probability(&end, &path.state(1.0)?)?;
    rep.success = rep.final_fidelity >= 1.0 - 1e-9;
    rep.ledger = s.ledger.since(&before);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::OracleConfig;
    use crate::quantum::PlanarPath;

    fn session(seed: u64) -> Session {
        Session::seeded(OracleConfig::default(), seed, 0)
    }

    #[test]
    fn overlap_free_reaches_end() {
        let path = PlanarPath::great_circle(3, 3.0).unwrap();
        let mut s = session(1);
        for _ in 0..200 {
            let rep = traverse_recursive_overlap_free(&mut s, &path, 0.1, DEPTH_CAP).unwrap();
            assert!(rep.success && rep.is_consistent());
            // every subdivided parent failed
            for w in rep.intervals.windows(2) {
                if w[1].depth > w[0].depth {
                    assert!(!w[0].success);
                }
            }
        }
    }

    #[test]
    fn dominant_short_path_single_attempt() {
        let path = PlanarPath::great_circle(4, 0.1).unwrap();
        let mut s = session(2);
        let params = DominantParams { copies: 30, ..DominantParams::default() };
        for _ in 0..20 {
            let rep = traverse_recursive_dominant(&mut s, &path, &params).unwrap();
            assert!(rep.success);
            assert_eq!(rep.attempts(), 1);
        }
    }

    #[test]
    fn dominant_long_path_subdivides() {
        let path = PlanarPath::great_circle(4, 1.5).unwrap();
        let mut s = session(3);
        let params = DominantParams { copies: 200, ..DominantParams::default() };
        let rep = traverse_recursive_dominant(&mut s, &path, &params).unwrap();
        assert!(rep.success, "{:?}", rep.intervals);
        assert!(rep.attempts() > 1);
        assert!(rep.is_consistent());
    }
}
