use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roadnet::RoadNetwork;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseStep {
    /// Incoming lanes that may proceed during this step.
    pub allowed: Vec<String>,
    pub duration: f64,
}

/// Fixed-time signal plan of one junction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalPhase {
    pub junction: String,
    pub cycle: Vec<PhaseStep>,
    #[serde(default)]
    pub offset: f64,
}

impl SignalPhase {
    pub fn validate(&self, network: &RoadNetwork) -> Result<()> {
        if network.junction(&self.junction).is_none() {
            return Err(Error::Config(format!("signal references unknown junction `{}`", self.junction)));
        }
        if self.cycle.is_empty() || self.cycle.iter().any(|p| !(p.duration > 0.0)) {
            return Err(Error::Validation(format!(
                "signal at `{}` needs a non-empty cycle with positive durations",
                self.junction
            )));
        }
        Ok(())
    }

    pub fn cycle_length(&self) -> f64 {
        self.cycle.iter().map(|p| p.duration).sum()
    }

    pub fn active_step(&self, t: f64) -> &PhaseStep {
        let mut r = (t - self.offset).rem_euclid(self.cycle_length());
        for p in &self.cycle {
            if r < p.duration {
                return p;
            }
            r -= p.duration;
        }
        self.cycle.last().expect("validated cycle is non-empty")
    }

    pub fn is_red(&self, lane: &str, t: f64) -> bool {
        !self.active_step(t).allowed.iter().any(|l| l == lane)
    }
}

/// Whether `lane`, ending at `junction`, faces a red light at time `t`.
pub fn red_for(signals: &[SignalPhase], junction: &str, lane: &str, t: f64) -> bool {
    signals
        .iter()
        .filter(|s| s.junction == junction)
        .any(|s| s.is_red(lane, t))
}
