//! Prebuilt scenarios, randomized check suites and the command-line front end.

pub mod checks;
pub mod cli;
pub mod peres;
pub mod remark;

use crate::error::{Error, Result};
use crate::phase_space::EPSILON_BOUND;

/// Run parameters shared by the scenarios.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub epsilon: f64,
    pub seed: u64,
    pub n_samples: usize,
    /// Include per-sample value vectors in reports.
    pub per_sample: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            epsilon: 0.3,
            seed: 42,
            n_samples: 100_000,
            per_sample: false,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < EPSILON_BOUND) {
            return Err(Error::InvalidEpsilon(self.epsilon));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidConfig("sample count must be positive".into()));
        }
        Ok(())
    }
}
