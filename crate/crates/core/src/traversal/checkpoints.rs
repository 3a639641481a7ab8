use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{overlap_probability, phase_distance, EigenPath};

/// 0 = s₀ < … < s_n = 1 with optional eigenphase anchors and overlaps p_{s_k, s_{k+1}}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoints {
    s: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    anchors: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    overlaps: Option<Vec<f64>>,
}

impl Checkpoints {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        let ok = s.len() >= 2 && s[0] == 0.0 && *s.last().unwrap() == 1.0 && s.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::InvalidParameter("checkpoints must increase strictly from 0 to 1".into()));
        }
        Ok(Self { s, anchors: None, overlaps: None })
    }

    /// n equal segments.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one segment".into()));
        }
        let mut s: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        s[n] = 1.0;
        Self::new(s)
    }

    /// Greedy subsequence of an (n+1)-point grid: each checkpoint is the last grid
    /// point whose overlap with the previous checkpoint stays at least `min_overlap`.
    pub fn greedy<P: EigenPath + ?Sized>(path: &P, min_overlap: f64, grid_points: usize) -> Result<Self> {
        let grid: Vec<f64> = (0..=grid_points).map(|k| k as f64 / grid_points as f64).collect();
        let states: Vec<_> = grid.iter().map(|&t| path.state(t)).collect::<Result<_>>()?;
        let mut s = vec![0.0];
        let mut k = 0;
        while k < grid_points {
            let mut next = None;
            for j in k + 1..=grid_points {
                if overlap_probability(&states[k], &states[j])? >= min_overlap {
                    next = Some(j);
                } else {
                    break;
                }
            }
            let j = next.ok_or_else(|| Error::Precondition(format!("grid too coarse at s = {}", grid[k])))?;
            s.push(grid[j]);
            k = j;
        }
        let mut cp = Self::new(s)?;
        cp.fill_overlaps(path)?;
        Ok(cp)
    }

    pub fn with_anchors(mut self, anchors: Vec<f64>) -> Result<Self> {
        if anchors.len() != self.s.len() {
            return Err(Error::DimensionMismatch { expected: self.s.len(), found: anchors.len() });
        }
        self.anchors = Some(anchors);
        Ok(self)
    }

    /// Anchors equal to the true eigenphases.
    pub fn with_exact_anchors<P: EigenPath + ?Sized>(self, path: &P) -> Result<Self> {
        let a = self.s.iter().map(|&s| Ok(path.target(s)?.phase)).collect::<Result<Vec<_>>>()?;
        self.with_anchors(a)
    }

    pub fn fill_overlaps<P: EigenPath + ?Sized>(&mut self, path: &P) -> Result<()> {
        let mut out = Vec::with_capacity(self.segments());
        for w in self.s.windows(2) {
            out.push(overlap_probability(&path.state(w[0])?, &path.state(w[1])?)?);
        }
        self.overlaps = Some(out);
        Ok(())
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn anchors(&self) -> Option<&[f64]> {
        self.anchors.as_deref()
    }

    pub fn overlaps(&self) -> Option<&[f64]> {
        self.overlaps.as_deref()
    }

    /// Number of segments n.
    pub fn segments(&self) -> usize {
        self.s.len() - 1
    }

    /// Largest distance of an anchor from the true eigenphase, if anchors are set.
    pub fn anchor_error<P: EigenPath + ?Sized>(&self, path: &P) -> Result<Option<f64>> {
        let Some(a) = &self.anchors else { return Ok(None) };
        let mut worst: f64 = 0.0;
        for (&s, &x) in self.s.iter().zip(a) {
            worst = worst.max(phase_distance(x, path.target(s)?.phase));
        }
        Ok(Some(worst))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{grover_path, PlanarPath};

    #[test]
    fn validation() {
        assert!(Checkpoints::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Checkpoints::new(vec![0.1, 1.0]).is_err());
        assert_eq!(Checkpoints::uniform(4).unwrap().segments(), 4);
    }

    #[test]
    fn greedy_respects_overlap() {
        let path = grover_path(16).unwrap();
        let cp = Checkpoints::greedy(&path, 1.0 / 3.0, 200).unwrap();
        assert!(cp.overlaps().unwrap().iter().all(|&p| p >= 1.0 / 3.0));
        let circle = PlanarPath::great_circle(3, 3.0).unwrap();
        let cp = Checkpoints::greedy(&circle, 0.5, 300).unwrap();
        // π/4 per segment on a length-3 arc
        assert_eq!(cp.segments(), 4);
        let cp = cp.with_exact_anchors(&circle).unwrap();
        assert_eq!(cp.anchor_error(&circle).unwrap(), Some(0.0));
    }
}
