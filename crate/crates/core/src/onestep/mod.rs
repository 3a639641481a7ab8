//! One-step transformations between eigenstates: the reflection chain T and its
//! variants on a single copy, plus the multi-copy eigenphase-range procedures.

mod chain;
mod dominance;
mod multicopy;

pub use chain::{
    rt_attempt, span_residual, suppression_ancilla, transform_t, transform_tm, transform_tmx_prime, transform_tx,
    transform_tx_prime, tx_alpha, tx_resolution, MAX_CHAIN_STEPS,
};
pub use dominance::{check_dominance, dominance_holds};
pub use multicopy::{
    er_parallel, er_x, transform_tp, transform_tpx, CopySpectrum, ErOutcome, ErxOutcome, MultiCopyState,
    MultiOutcome, ErxContract,
};

use serde::{Deserialize, Serialize};

use crate::quantum::StateVector;

/// Content of the flag register of the procedures that may decline to transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flag {
    Zero,
    One,
    Hash,
}

/// Result of a single-copy transformation.
#[derive(Clone, Debug)]
pub struct AttemptOutcome {
    pub success: bool,
    pub reflections: u64,
    pub state: StateVector,
    pub reported_phase: Option<f64>,
    pub flag: Option<Flag>,
}
