//! Surrogate safety measures: collision margins, traditional and
//! high-fidelity time-to-collision, and the error statistics that compare
//! both against the simulated contact time.

mod ttc;

use serde::{Deserialize, Serialize};

pub use ttc::{
    high_fidelity_ttc, high_fidelity_ttc_value, margin_gr, margin_gv, traditional_ttc, traditional_ttc_against,
    traditional_ttc_obstacle, traditional_ttc_value, Counterpart, HfConfig, TtcMethod, TtcParty, TtcResult,
    DEFAULT_HORIZON, DEFAULT_TTC_DT, ROOT_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::roadnet::SlopeField;
use crate::stats::ErrorSummary;

/// One row of the TTC comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMetrics {
    pub scenario: String,
    pub traditional: Option<f64>,
    pub simulated: Option<f64>,
    pub high_fidelity: Option<f64>,
}

impl ScenarioMetrics {
    pub fn is_complete(&self) -> bool {
        self.traditional.is_some() && self.simulated.is_some() && self.high_fidelity.is_some()
    }

    pub fn err_traditional(&self) -> Option<f64> {
        Some(self.traditional? - self.simulated?)
    }

    pub fn err_high_fidelity(&self) -> Option<f64> {
        Some(self.high_fidelity? - self.simulated?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub traditional: ErrorSummary,
    pub high_fidelity: ErrorSummary,
    /// Number of complete rows that entered the statistics.
    pub count: usize,
}

/// Error statistics of each method against the simulated TTC, over the
/// rows that have all three values.
pub fn error_stats(metrics: &[ScenarioMetrics]) -> Result<StatsReport> {
    let complete: Vec<&ScenarioMetrics> = metrics.iter().filter(|m| m.is_complete()).collect();
    if complete.is_empty() {
        return Err(Error::Validation("no scenario has traditional, simulated and high-fidelity TTC".into()));
    }
    let trad: Vec<f64> = complete.iter().filter_map(|m| m.err_traditional()).collect();
    let hf: Vec<f64> = complete.iter().filter_map(|m| m.err_high_fidelity()).collect();
    Ok(StatsReport {
        traditional: ErrorSummary::from_errors(&trad),
        high_fidelity: ErrorSummary::from_errors(&hf),
        count: complete.len(),
    })
}

/// Both TTC estimates at a trigger plus the simulated contact time.
pub fn ttc_at_trigger(
    scenario: &str,
    ego: &TtcParty,
    counterpart: &Counterpart,
    slope: &dyn SlopeField,
    cfg: &HfConfig,
    trigger_time: f64,
    contact_time: Option<f64>,
) -> Result<ScenarioMetrics> {
    let trad = traditional_ttc_against(ego, counterpart, cfg.horizon, trigger_time);
    let hf = high_fidelity_ttc(ego, counterpart, slope, cfg, trigger_time)?;
    Ok(ScenarioMetrics {
        scenario: scenario.to_string(),
        traditional: trad.value,
        simulated: contact_time.map(|t| t - trigger_time),
        high_fidelity: hf.value,
    })
}
