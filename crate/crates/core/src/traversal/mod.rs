//! Path-level traversals: known checkpoints, parallel copies, checkpoint
//! reduction, and the two recursive binary-interval-tree descents.

mod bit;
mod checkpoints;
mod known;
mod recursive;

pub use bit::{enumerate_bit, BitNode, NodeStatus};
pub use checkpoints::Checkpoints;
pub use known::{reduce_checkpoints, traverse_known, traverse_parallel, Reduction};
pub use recursive::{traverse_recursive_dominant, traverse_recursive_overlap_free, DominantParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::onestep::Flag;
use crate::oracles::{CostLedger, Reflection};
use crate::quantum::{SpectralOperator, StateVector};

/// Default recursion depth cap.
pub const DEPTH_CAP: usize = 40;

/// One attempted interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub c: f64,
    pub d: f64,
    pub depth: usize,
    /// arccos |⟨ψ_c|ψ_d⟩|
    pub angle: f64,
    pub reflections: u64,
    pub pe_calls: u64,
    pub success: bool,
    pub flag: Option<Flag>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraversalReport {
    pub success: bool,
    pub final_fidelity: f64,
    pub reflections: u64,
    pub pe_calls: u64,
    pub intervals: Vec<IntervalRecord>,
    /// (s, reported eigenphase) for every checkpoint whose phase was estimated.
    pub anchors: Vec<(f64, f64)>,
    pub ledger: CostLedger,
}

impl TraversalReport {
    fn new() -> Self {
        Self {
            success: true,
            final_fidelity: 0.0,
            reflections: 0,
            pe_calls: 0,
            intervals: Vec::new(),
            anchors: Vec::new(),
            ledger: CostLedger::default(),
        }
    }

    fn push(&mut self, rec: IntervalRecord) {
        self.reflections += rec.reflections;
        self.pe_calls += rec.pe_calls;
        self.intervals.push(rec);
    }

    /// Number of attempted intervals.
    pub fn attempts(&self) -> usize {
        self.intervals.len()
    }

    /// Totals equal the per-interval sums.
    pub fn is_consistent(&self) -> bool {
        self.reflections == self.intervals.iter().map(|r| r.reflections).sum::<u64>()
            && self.pe_calls == self.intervals.iter().map(|r| r.pe_calls).sum::<u64>()
    }
}

/// R(U, φ̃, Δ) that must isolate exactly one eigenvector.
fn anchored_reflection(op: &SpectralOperator, anchor: f64, delta: f64) -> Result<Reflection> {
    let r = Reflection::oracle(op, anchor, delta);
    if r.rank() != 1 {
        return Err(Error::Precondition(format!("anchor {anchor:.4} isolates {} eigenvectors", r.rank())));
    }
    Ok(r)
}

fn angle_between(a: &StateVector, b: &StateVector) -> Result<f64> {
    crate::quantum::angular_distance(a, b)
}
