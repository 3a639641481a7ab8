//! Piecewise-constant speed profiles and the speed-variation functionals used to
//! bound the cost of a binary interval tree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::geometry::max_window_speed;

const EPS: f64 = 1e-12;

/// Angular speed, constant between consecutive breakpoints of [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedProfile {
    breaks: Vec<f64>,
    speeds: Vec<f64>,
    cum: Vec<f64>,
}

impl SpeedProfile {
    pub fn new(breaks: Vec<f64>, speeds: Vec<f64>) -> Result<Self> {
        let ok = breaks.len() == speeds.len() + 1
            && breaks.len() >= 2
            && breaks[0] == 0.0
            && *breaks.last().unwrap() == 1.0
            && breaks.windows(2).all(|w| w[0] < w[1])
            && speeds.iter().all(|&v| v >= 0.0 && v.is_finite());
        if !ok {
            return Err(Error::InvalidParameter("malformed speed profile".into()));
        }
        let mut cum = vec![0.0];
        for (i, v) in speeds.iter().enumerate() {
            cum.push(cum[i] + v * (breaks[i + 1] - breaks[i]));
        }
        Ok(Self { breaks, speeds, cum })
    }

    pub fn uniform(length: f64) -> Self {
        Self::new(vec![0.0, 1.0], vec![length]).expect("uniform profile")
    }

    /// Equal-width pieces with the given speeds.
    pub fn stepped(speeds: &[f64]) -> Result<Self> {
        let n = speeds.len();
        Self::new((0..=n).map(|i| i as f64 / n as f64).collect(), speeds.to_vec())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn piece(&self, s: f64) -> usize {
        match self.breaks.iter().rposition(|&b| b <= s) {
            Some(i) => i.min(self.speeds.len() - 1),
            None => 0,
        }
    }

    /// L(s), the length from 0 to s.
    pub fn length_at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        let i = self.piece(s);
        self.cum[i] + self.speeds[i] * (s - self.breaks[i])
    }

    /// inf{s : L(s) ≥ l}
    pub fn s_lower(&self, l: f64) -> f64 {
        if l <= 0.0 {
            return 0.0;
        }
        for i in 0..self.speeds.len() {
            if self.cum[i + 1] >= l && self.speeds[i] > 0.0 {
                return (self.breaks[i] + (l - self.cum[i]) / self.speeds[i]).clamp(self.breaks[i], self.breaks[i + 1]);
            }
        }
        1.0
    }

    /// sup{s : L(s) ≤ l}
    pub fn s_upper(&self, l: f64) -> f64 {
        if l >= self.total() {
            return 1.0;
        }
        for i in (0..self.speeds.len()).rev() {
            if self.cum[i] <= l && self.speeds[i] > 0.0 {
                return (self.breaks[i] + (l - self.cum[i]) / self.speeds[i]).clamp(self.breaks[i], self.breaks[i + 1]);
            }
        }
        0.0
    }

    /// Breakpoint-refined grid of [a, b] with `per_unit` uniform points per unit s
    /// plus the preimages of the given lengths.
    pub fn grid(&self, a: f64, b: f64, per_unit: usize, lengths: &[f64]) -> Vec<f64> {
        let n = ((b - a) * per_unit as f64).ceil().max(1.0) as usize;
        let mut g: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        g.extend(self.breaks.iter().copied().filter(|&x| x > a && x < b));
        for &l in lengths {
            g.push(self.s_lower(l));
            g.push(self.s_upper(l));
        }
        g.retain(|&x| x >= a && x <= b);
        g.sort_by(f64::total_cmp);
        g.dedup_by(|x, y| (*x - *y).abs() < EPS);
        g
    }

    /// v_max at scale θ over [0, 1] (windows with ΔL ≥ θ).
    pub fn v_max(&self, theta: f64) -> f64 {
        let v_avg = self.total();
        let mut lens = Vec::new();
        for &c in &self.cum {
            lens.extend([c - theta, c + theta]);
        }
        let pts: Vec<(f64, f64)> = self
            .grid(0.0, 1.0, 200, &lens)
            .into_iter()
            .map(|s| (s, self.length_at(s)))
            .collect();
        max_window_speed(&pts, theta).unwrap_or(v_avg).max(v_avg)
    }
}

fn critical_lengths(p: &SpeedProfile, l: f64, theta: f64) -> Vec<f64> {
    let mut v = vec![l, l - theta, l + theta, l - 2.0 * theta, l + 2.0 * theta];
    for &c in &p.cum {
        v.extend([c, c - theta, c + theta, c - 2.0 * theta, c + 2.0 * theta]);
    }
    v
}

/// σ_θ(l, [a, b]) on an explicit grid of s values (closure of the strict length constraint).
pub fn sigma_theta_on_grid(p: &SpeedProfile, l: f64, (a, b): (f64, f64), theta: f64, grid: &[f64]) -> f64 {
    if p.length_at(b) - p.length_at(a) <= theta {
        return 1.0;
    }
    let g: Vec<f64> = grid.iter().copied().filter(|&s| s >= a && s <= b).collect();
    let lg: Vec<f64> = g.iter().map(|&s| p.length_at(s)).collect();
    let n = g.len();
    // far[i]: largest index k ≥ i with L(g_k) − L(g_i) ≤ 2θ
    let mut far = vec![0usize; n];
    let mut k = 0;
    for i in 0..n {
        k = k.max(i);
        while k + 1 < n && lg[k + 1] - lg[i] <= 2.0 * theta + EPS {
            k += 1;
        }
        far[i] = k;
    }
    let mut best: Option<f64> = None;
    for j in 0..n {
        if !(lg[j] < l) {
            continue;
        }
        for k in j + 1..n {
            if !(lg[k] > l) || lg[k] - lg[j] < theta - EPS {
                continue;
            }
            let den = g[k] - g[j];
            for i in 0..=j {
                if far[i] >= k {
                    let r = (g[far[i]] - g[i]) / den;
                    best = Some(best.map_or(r, |x: f64| x.max(r)));
                }
            }
        }
    }
    best.unwrap_or(1.0)
}

/// σ_θ(l, [a, b]) on the profile's breakpoint-refined grid.
pub fn sigma_theta(p: &SpeedProfile, l: f64, interval: (f64, f64), theta: f64) -> f64 {
    let grid = p.grid(interval.0, interval.1, 48, &critical_lengths(p, l, theta));
    sigma_theta_on_grid(p, l, interval, theta, &grid)
}

/// ρ_θ(l, [a, b]), evaluated at the vertices where the ratio can peak.
pub fn rho_theta(p: &SpeedProfile, l: f64, (a, b): (f64, f64), theta: f64) -> f64 {
    let (la, lb) = (p.length_at(a), p.length_at(b));
    let su = |x: f64| p.s_upper(x).clamp(a, b);
    let sl = |x: f64| p.s_lower(x).clamp(a, b);
    let lo2 = la.max(l - theta);
    let hi2 = l.min(lb - theta);
    if !(lo2 <= hi2) {
        return 1.0;
    }
    let mut l2s = vec![lo2, hi2];
    for i in 1..16 {
        l2s.push(lo2 + (hi2 - lo2) * i as f64 / 16.0);
    }
    for &c in &p.cum {
        l2s.extend([c, c - theta]);
    }
    let mut best: Option<f64> = None;
    for &l2 in l2s.iter().filter(|&&x| x >= lo2 && x <= hi2) {
        let l3 = l2 + theta;
        let lo1 = la.max(l2 - theta);
        let mut l1s = vec![lo1, l2];
        for i in 1..16 {
            l1s.push(lo1 + (l2 - lo1) * i as f64 / 16.0);
        }
        for &c in &p.cum {
            l1s.extend([c, c - 2.0 * theta, lb - 2.0 * theta]);
        }
        let dn = sl(l3) - su(l2);
        if !(dn > 0.0) {
            continue;
        }
        let v_hi = theta / dn;
        for &l1 in l1s.iter().filter(|&&x| x >= lo1 && x <= l2) {
            let l4 = (l1 + 2.0 * theta).min(lb);
            if l4 < l3 {
                continue;
            }
            let ds = su(l4) - sl(l1);
            if !(ds > 0.0) {
                continue;
            }
            let v_lo = (l4 - l1) / ds;
            let r = v_hi / v_lo;
            best = Some(best.map_or(r, |x: f64| x.max(r)));
        }
    }
    best.unwrap_or(1.0)
}

/// Number of BIT(a, b) nodes of angular length above θ, each charged `c_max`.
pub fn bit_cost_enumerated(p: &SpeedProfile, theta: f64, (a, b): (f64, f64), c_max: f64, depth_cap: usize) -> Result<f64> {
    fn walk(p: &SpeedProfile, theta: f64, c: f64, d: f64, depth: usize, cap: usize) -> Result<u64> {
        if p.length_at(d) - p.length_at(c) <= theta {
            return Ok(0);
        }
        if depth >= cap {
            return Err(Error::DepthCap { cap });
        }
        let m = 0.5 * (c + d);
        Ok(1 + walk(p, theta, c, m, depth + 1, cap)? + walk(p, theta, m, d, depth + 1, cap)?)
    }
    Ok(walk(p, theta, a, b, 0, depth_cap)? as f64 * c_max)
}

/// Integral bound on the BIT cost; `cost_ceiling(θ')` bounds costs of intervals with
/// θ' < ΔL ≤ 2θ'.
pub fn bit_cost_bound(p: &SpeedProfile, theta: f64, (a, b): (f64, f64), cost_ceiling: impl Fn(f64) -> f64) -> f64 {
    let (la, lb) = (p.length_at(a), p.length_at(b));
    let span = lb - la;
    let samples = 160;
    let mut total = 0.0;
    let mut k = 0;
    loop {
        let scale = theta * 2f64.powi(k);
        if span <= scale {
            break;
        }
        let c_bar = cost_ceiling(scale);
        let mut integral = 0.0;
        for i in 0..samples {
            let l = la + span * (i as f64 + 0.5) / samples as f64;
            let sig = sigma_theta(p, l, (a, b), scale);
            integral += ((sig.log2() + 1e-9).floor() + 1.0) * c_bar;
        }
        total += integral * span / samples as f64 / 2f64.powi(k);
        k += 1;
    }
    total / theta
}

/// 2(L(b)−L(a))(log₂(v_max/v_avg)+3)·C_max/θ over [0, 1].
pub fn bit_cost_rough(p: &SpeedProfile, theta: f64, c_max: f64) -> f64 {
    let len = p.total();
    if len <= theta {
        return 0.0;
    }
    let ratio = (p.v_max(theta) / len).log2().max(0.0);
    2.0 * len * (ratio + 3.0) * c_max / theta
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_speed(l: f64) -> SpeedProfile {
        SpeedProfile::new(vec![0.0, 0.5, 1.0], vec![2.0 * l, 0.0]).unwrap()
    }

    #[test]
    fn inverse_lengths() {
        let p = two_speed(1.0);
        assert_abs_diff_eq!(p.length_at(0.25), 0.5);
        assert_abs_diff_eq!(p.s_lower(1.0), 0.5);
        assert_abs_diff_eq!(p.s_upper(1.0), 1.0);
        assert_abs_diff_eq!(p.s_lower(0.5), 0.25);
        assert!(p.s_lower(0.3) <= p.s_upper(0.3));
    }

    // naive four-loop oracle on a uniform grid
    fn sigma_brute(p: &SpeedProfile, l: f64, theta: f64, n: usize) -> f64 {
        let g: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let lg: Vec<f64> = g.iter().map(|&s| p.length_at(s)).collect();
        let mut best = 1.0f64;
        for i in 0..=n {
            for j in i..=n {
                for k in j + 1..=n {
                    if !(lg[j] < l && l < lg[k] && lg[k] - lg[j] >= theta - EPS) {
                        continue;
                    }
                    for m in k..=n {
                        if lg[m] - lg[i] <= 2.0 * theta + EPS {
                            best = best.max((g[m] - g[i]) / (g[k] - g[j]));
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn two_speed_sigma_matches_brute_force() {
        let l_tot = 1.0;
        let p = two_speed(l_tot);
        let theta = l_tot / 4.0;
        let grid: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        for &l in &[0.3, 0.55, 0.7, 0.9] {
            let fast = sigma_theta_on_grid(&p, l, (0.0, 1.0), theta, &grid);
            let brute = sigma_brute(&p, l, theta, 80);
            assert_abs_diff_eq!(fast, brute, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(sigma_theta(&p, 0.7, (0.0, 1.0), theta), 6.0, epsilon = 1e-9);
    }

    #[test]
    fn empty_set_convention() {
        let p = SpeedProfile::uniform(0.5);
        assert_eq!(sigma_theta(&p, 0.2, (0.0, 1.0), 0.6), 1.0);
        assert_eq!(rho_theta(&p, 0.2, (0.0, 1.0), 0.6), 1.0);
    }

    #[test]
    fn uniform_sigma_and_rho() {
        let p = SpeedProfile::uniform(2.0);
        let s = sigma_theta(&p, 1.0, (0.0, 1.0), 0.25);
        let r = rho_theta(&p, 1.0, (0.0, 1.0), 0.25);
        assert_abs_diff_eq!(s, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn bit_costs_uniform() {
        let theta = 0.1;
        let p = SpeedProfile::uniform(10.0 * theta);
        assert_abs_diff_eq!(bit_cost_rough(&p, theta, 1.0), 60.0, epsilon = 1e-9);
        let enumerated = bit_cost_enumerated(&p, theta, (0.0, 1.0), 1.0, 40).unwrap();
        assert_eq!(enumerated, 15.0);
        let integral = bit_cost_bound(&p, theta, (0.0, 1.0), |_| 1.0);
        assert!(enumerated <= integral && integral <= 60.0, "{integral}");
        let short = SpeedProfile::uniform(0.05);
        assert_eq!(bit_cost_enumerated(&short, theta, (0.0, 1.0), 1.0, 40).unwrap(), 0.0);
    }
}
