//! Phase estimation, phase detection, reflection and overlap oracles, simulated
//! exactly through spectral decompositions and charged to a cost ledger.

mod config;
mod ledger;
mod ops;
mod reflection;

pub use config::{oracle_cost, NoiseMode, OracleConfig};
pub use ledger::CostLedger;
pub use ops::{ov, pd, pe, pe_reverse, reflect, PhaseEstimate};
pub use reflection::{Reflection, ReflectionCost};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// RNG used for every simulated run.
pub type SimRng = ChaCha8Rng;

/// Independent stream `stream` of the master `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Oracle configuration, cost ledger and RNG for one run.
#[derive(Clone, Debug)]
pub struct Session<R = SimRng> {
    pub config: OracleConfig,
    pub ledger: CostLedger,
    pub rng: R,
}

impl<R: Rng> Session<R> {
    pub fn new(config: OracleConfig, rng: R) -> Self {
        Self { config, ledger: CostLedger::default(), rng }
    }

    /// True with probability ε² in noisy mode.
    pub(crate) fn corrupted(&mut self) -> bool {
        match self.config.mode {
            NoiseMode::Ideal => false,
            NoiseMode::Noisy => self.rng.gen::<f64>() < self.config.epsilon * self.config.epsilon,
        }
    }

    pub(crate) fn noise_probability(&self) -> f64 {
        match self.config.mode {
            NoiseMode::Ideal => 0.0,
            NoiseMode::Noisy => self.config.epsilon * self.config.epsilon,
        }
    }

    pub(crate) fn cost(&self, delta: f64) -> u64 {
        oracle_cost(delta, self.config.epsilon, self.config.cost_constant)
    }
}

impl Session<SimRng> {
    pub fn seeded(config: OracleConfig, seed: u64, stream: u64) -> Self {
        Self::new(config, stream_rng(seed, stream))
    }
}
