use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

/// Per-run counters; merged by addition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    pub unitary_applications: u64,
    pub reflections: u64,
    pub pe_calls: u64,
    pub pe_reversals: u64,
    pub pd_calls: u64,
    pub reflect_calls: u64,
    pub ov_calls: u64,
    /// Costs recorded by callers for Γ-moment estimation.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<u64>,
}

impl CostLedger {
    pub fn record(&mut self, cost: u64) {
        self.samples.push(cost);
    }

    /// Counter differences against an earlier snapshot of the same ledger.
    pub fn since(&self, earlier: &CostLedger) -> CostLedger {
        CostLedger {
            unitary_applications: self.unitary_applications - earlier.unitary_applications,
            reflections: self.reflections - earlier.reflections,
            pe_calls: self.pe_calls - earlier.pe_calls,
            pe_reversals: self.pe_reversals - earlier.pe_reversals,
            pd_calls: self.pd_calls - earlier.pd_calls,
            reflect_calls: self.reflect_calls - earlier.reflect_calls,
            ov_calls: self.ov_calls - earlier.ov_calls,
            samples: Vec::new(),
        }
    }

    /// Counters only, without the sample log.
    pub fn counters(&self) -> CostLedger {
        CostLedger { samples: Vec::new(), ..self.clone() }
    }

    /// Oracle invocations of every kind; reversals count separately.
    pub fn oracle_calls(&self) -> u64 {
        self.pe_calls + self.pe_reversals + self.pd_calls + self.reflect_calls + self.ov_calls
    }

    pub fn dominates(&self, other: &CostLedger) -> bool {
        self.unitary_applications >= other.unitary_applications
            && self.reflections >= other.reflections
            && self.pe_calls >= other.pe_calls
            && self.pe_reversals >= other.pe_reversals
            && self.pd_calls >= other.pd_calls
            && self.reflect_calls >= other.reflect_calls
            && self.ov_calls >= other.ov_calls
    }
}

impl AddAssign<&CostLedger> for CostLedger {
    fn add_assign(&mut self, o: &CostLedger) {
        self.unitary_applications += o.unitary_applications;
        self.reflections += o.reflections;
        self.pe_calls += o.pe_calls;
        self.pe_reversals += o.pe_reversals;
        self.pd_calls += o.pd_calls;
        self.reflect_calls += o.reflect_calls;
        self.ov_calls += o.ov_calls;
        self.samples.extend_from_slice(&o.samples);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_and_diff() {
        let mut a = CostLedger { reflections: 3, pe_calls: 1, ..Default::default() };
        let b = CostLedger { reflections: 2, ov_calls: 4, samples: vec![7], ..Default::default() };
        let before = a.clone();
        a += &b;
        assert_eq!(a.reflections, 5);
        assert_eq!(a.samples, vec![7]);
        assert!(a.dominates(&before));
        assert_eq!(a.since(&before).ov_calls, 4);
        assert_eq!(a.oracle_calls(), 5);
    }
}
