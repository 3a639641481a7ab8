use serde::{Deserialize, Serialize};

use super::path::EigenPath;
use super::state::{angular_distance, StateVector};
use crate::error::{Error, Result};

/// Angular length and locally averaged velocities of a path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathGeometry {
    pub length: f64,
    pub v_max: f64,
    pub v_avg: f64,
    pub theta: f64,
}

impl PathGeometry {
    /// log₂(v_max/v_avg), zero for constant paths.
    pub fn speed_ratio_log2(&self) -> f64 {
        if self.v_avg > 0.0 { (self.v_max / self.v_avg).log2().max(0.0) } else { 0.0 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LengthOptions {
    pub tol: f64,
    pub max_segment_angle: f64,
    pub depth_cap: usize,
    pub initial_segments: usize,
}

impl Default for LengthOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_segment_angle: 0.05, depth_cap: 40, initial_segments: 16 }
    }
}

/// Cumulative length samples (s, L(a, s)) produced by adaptive refinement.
#[derive(Clone, Debug)]
pub struct LengthGrid {
    pub points: Vec<(f64, f64)>,
}

impl LengthGrid {
    pub fn total(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }
}

struct Refiner<'a, P: EigenPath + ?Sized> {
    path: &'a P,
    opts: LengthOptions,
    span: f64,
}

impl<P: EigenPath + ?Sized> Refiner<'_, P> {
    // Pushes accepted points of (c, d], cumulative from `base`; returns segment length.
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        c: f64,
        d: f64,
        psi_c: &StateVector,
        psi_d: &StateVector,
        depth: usize,
        base: f64,
        out: &mut Vec<(f64, f64)>,
    ) -> Result<f64> {
        let m = 0.5 * (c + d);
        let psi_m = self.path.state(m)?;
        let whole = angular_distance(psi_c, psi_d)?;
        let left = angular_distance(psi_c, &psi_m)?;
        let right = angular_distance(&psi_m, psi_d)?;
        let defect = left + right - whole;
        if whole <= self.opts.max_segment_angle && defect.abs() <= self.opts.tol * (d - c) / self.span {
            out.push((m, base + left));
            out.push((d, base + left + right));
            return Ok(left + right);
        }
        if depth >= self.opts.depth_cap {
            return Err(Error::DepthCap { cap: self.opts.depth_cap });
        }
        let l = self.refine(c, m, psi_c, &psi_m, depth + 1, base, out)?;
        let r = self.refine(m, d, &psi_m, psi_d, depth + 1, base + l, out)?;
        Ok(l + r)
    }
}

/// Adaptive length grid on [a, b]; jumps at breakpoints are added as one-term sums.
pub fn length_grid<P: EigenPath + ?Sized>(path: &P, a: f64, b: f64, opts: LengthOptions) -> Result<LengthGrid> {
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("path_length needs a < b, got [{a}, {b}]")));
    }
    let mut cuts = vec![a];
    cuts.extend(path.breakpoints().into_iter().filter(|&x| x > a && x < b));
    cuts.push(b);
    let refiner = Refiner { path, opts, span: b - a };
    let mut points = vec![(a, 0.0)];
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (x, y) = (w[0], w[1]);
        if x > a {
            let jump = angular_distance(&path.state_before(x)?, &path.state(x)?)?;
            if jump > 0.0 {
                total += jump;
                points.push((x, total));
            }
        }
        let n = opts.initial_segments.max(1);
        let mut prev = path.state(x)?;
        for i in 0..n {
            let c = x + (y - x) * i as f64 / n as f64;
            let d = if i + 1 == n { y } else { x + (y - x) * (i + 1) as f64 / n as f64 };
            let next = if i + 1 == n { path.state_before(y)? } else { path.state(d)? };
            total += refiner.refine(c, d, &prev, &next, 0, total, &mut points)?;
            prev = next;
        }
    }
    Ok(LengthGrid { points })
}

/// Angular length L(a, b) by adaptive bisection.
pub fn path_length<P: EigenPath + ?Sized>(path: &P, a: f64, b: f64, tol: f64) -> Result<f64> {
    let opts = LengthOptions { tol, ..LengthOptions::default() };
    Ok(length_grid(path, a, b, opts)?.total())
}

/// Largest average speed over grid windows of angular length at least θ.
pub fn max_window_speed(points: &[(f64, f64)], theta: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (ds, dl) = (points[j].0 - points[i].0, points[j].1 - points[i].1);
            if ds > 0.0 && dl >= theta - 1e-12 {
                let v = dl / ds;
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
    }
    best
}

/// L, v_avg and v_max over [0, 1] at angular scale θ.
pub fn velocity_profile<P: EigenPath + ?Sized>(path: &P, theta: f64) -> Result<PathGeometry> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!("θ must be positive, got {theta}")));
    }
    let grid = length_grid(path, 0.0, 1.0, LengthOptions::default())?;
    let length = grid.total();
    let v_avg = length;
    let v_max = max_window_speed(&grid.points, theta).unwrap_or(v_avg).max(v_avg);
    Ok(PathGeometry { length, v_max, v_avg, theta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::speed::SpeedProfile;
    use crate::quantum::path::{DiscretePath, PlanarPath};
    use approx::assert_abs_diff_eq;

    #[test]
    fn great_circle_length_matches_closed_form_and_fine_sum() {
        let omega = 1.3;
        let p = PlanarPath::great_circle(2, omega).unwrap();
        let l = path_length(&p, 0.0, 1.0, 1e-8).unwrap();
        assert_abs_diff_eq!(l, omega, epsilon = 1e-6);
        // fine-grid summation oracle
        let n = 20_000;
        let mut fine = 0.0;
        for i in 0..n {
            let a = p.state(i as f64 / n as f64).unwrap();
            let b = p.state((i + 1) as f64 / n as f64).unwrap();
            fine += angular_distance(&a, &b).unwrap();
        }
        assert_abs_diff_eq!(l, fine, epsilon = 1e-6);
    }

    #[test]
    fn constant_and_jump_paths() {
        let c = PlanarPath::new(3, SpeedProfile::uniform(0.0)).unwrap();
        assert_abs_diff_eq!(path_length(&c, 0.0, 1.0, 1e-6).unwrap(), 0.0);
        let alpha: f64 = 0.7;
        let a = StateVector::basis(2, 0).unwrap();
        let b = StateVector::from_real(&[alpha.cos(), alpha.sin()]).unwrap();
        let d = DiscretePath::new(vec![a, b]).unwrap();
        assert_abs_diff_eq!(path_length(&d, 0.0, 1.0, 1e-6).unwrap(), alpha, epsilon = 1e-12);
    }

    #[test]
    fn velocity_conventions() {
        let p = PlanarPath::great_circle(2, 1.0).unwrap();
        let g = velocity_profile(&p, 0.3).unwrap();
        assert_abs_diff_eq!(g.v_max, g.v_avg, epsilon = 1e-6);
        let g = velocity_profile(&p, 2.0).unwrap();
        assert_eq!(g.v_max, g.v_avg);
        assert!(velocity_profile(&p, 0.0).is_err());
    }

    #[test]
    fn two_speed_matches_pair_scan() {
        let l = 1.2;
        let prof = SpeedProfile::new(vec![0.0, 0.5, 1.0], vec![2.0 * l, 0.0]).unwrap();
        let p = PlanarPath::new(2, prof).unwrap();
        let theta = l / 4.0;
        let g = velocity_profile(&p, theta).unwrap();
        // exhaustive scan over a uniform grid of states
        let n = 400;
        let pts: Vec<(f64, f64)> = {
            let mut acc = 0.0;
            let mut v = vec![(0.0, 0.0)];
            for i in 0..n {
                let a = p.state(i as f64 / n as f64).unwrap();
                let b = p.state((i + 1) as f64 / n as f64).unwrap();
                acc += angular_distance(&a, &b).unwrap();
                v.push(((i + 1) as f64 / n as f64, acc));
            }
            v
        };
        let brute = max_window_speed(&pts, theta).unwrap();
        assert_abs_diff_eq!(g.length, l, epsilon = 1e-6);
        assert_abs_diff_eq!(g.v_max, brute, epsilon = 1e-4);
        assert_abs_diff_eq!(g.v_max, 2.0 * l, epsilon = 1e-4);
    }
}
