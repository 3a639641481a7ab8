use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    #[default]
    Ideal,
    Noisy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub mode: NoiseMode,
    pub epsilon: f64,
    pub cost_constant: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { mode: NoiseMode::Ideal, epsilon: 0.01, cost_constant: 2.0 * std::f64::consts::LN_2 }
    }
}

impl OracleConfig {
    pub fn noisy(epsilon: f64) -> Self {
        Self { mode: NoiseMode::Noisy, epsilon, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.cost_constant > 0.0) {
            return Err(Error::InvalidParameter(format!("cost constant must be positive, got {}", self.cost_constant)));
        }
        Ok(())
    }
}

/// ⌈c·ln(1/ε)/δ⌉ applications of the controlled unitary.
pub fn oracle_cost(delta: f64, epsilon: f64, c: f64) -> u64 {
    (c * (1.0 / epsilon).ln() / delta).ceil().max(0.0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn cost_examples() {
        assert_eq!(oracle_cost(PI, 1.0 / E, 1.0), 1);
        assert_eq!(oracle_cost(0.1, 1e-6, 1.0), 139);
        assert_eq!(oracle_cost(PI, 0.5, 2.0 * std::f64::consts::LN_2), 1);
        let a = oracle_cost(0.2, 1e-3, 1.0);
        let b = oracle_cost(0.1, 1e-3, 1.0);
        assert!(b == 2 * a || b + 1 == 2 * a);
    }

    #[test]
    fn validation() {
        assert!(OracleConfig::default().validate().is_ok());
        assert!(OracleConfig { epsilon: 1.0, ..Default::default() }.validate().is_err());
        assert!(OracleConfig { cost_constant: 0.0, ..Default::default() }.validate().is_err());
    }
}
