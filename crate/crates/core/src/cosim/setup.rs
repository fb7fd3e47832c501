use serde::{Deserialize, Serialize};

use crate::dynamics::{FeedbackGains, VehicleParams, VehicleState};
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::roadnet::RoadNetwork;
use crate::safety::HfConfig;
use crate::traffic::{DemandSpec, NpcVehicle, SignalPhase};

pub const DEFAULT_DECEL_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub macro_dt: f64,
    pub micro_substeps: u32,
    pub horizon: f64,
    pub seed: u64,
    #[serde(default)]
    pub ttc: HfConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            macro_dt: 0.1,
            micro_substeps: 10,
            horizon: 30.0,
            seed: 0,
            ttc: HfConfig::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.macro_dt > 0.0) || self.micro_substeps < 1 || !(self.horizon > 0.0) {
            return Err(Error::Validation(
                "sim config needs macro_dt > 0, micro_substeps >= 1 and horizon > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn step_count(&self) -> u64 {
        (self.horizon / self.macro_dt - 1e-9).ceil().max(0.0) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TriggerSpec {
    DecelOnset {
        #[serde(default = "default_threshold")]
        threshold: f64,
    },
    JunctionEntry {
        junction: String,
    },
}

fn default_threshold() -> f64 {
    DEFAULT_DECEL_THRESHOLD
}

/// One entry of an open-loop control timeline. Either `accel` or the pedal
/// pair is given; the entry holds until the next one starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimedCommand {
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub throttle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brake: Option<f64>,
}

impl TimedCommand {
    pub fn validate(&self) -> Result<()> {
        let pedal = self.throttle.is_some() || self.brake.is_some();
        if self.accel.is_some() == pedal {
            return Err(Error::Validation(format!(
                "command at t={} needs exactly one of `accel` or throttle/brake pedals",
                self.t
            )));
        }
        for p in [self.throttle, self.brake].into_iter().flatten() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Validation(format!("pedal value {p} at t={} is outside [0, 1]", self.t)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Longitudinal {
    Feedback(FeedbackGains),
    Scripted(Vec<TimedCommand>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Lateral {
    PurePursuit { lookahead: f64 },
    Constant { steer: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoController {
    pub longitudinal: Longitudinal,
    pub lateral: Lateral,
}

impl EgoController {
    /// Command active at time `t` and whether it is the last one.
    pub fn scripted_at(&self, t: f64) -> Option<(TimedCommand, bool)> {
        let Longitudinal::Scripted(cmds) = &self.longitudinal else {
            return None;
        };
        let i = cmds.iter().rposition(|c| c.t <= t + 1e-9)?;
        Some((cmds[i], i + 1 == cmds.len()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EgoVehicle {
    pub id: String,
    pub state: VehicleState,
    pub params: VehicleParams,
    pub path: Vec<Point2>,
    pub controller: EgoController,
    /// Tire friction override; the lane friction applies when absent.
    pub tire_friction: Option<f64>,
}

/// Everything a run needs besides the network and the clock settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub egos: Vec<EgoVehicle>,
    pub npcs: Vec<NpcVehicle>,
    pub demand: DemandSpec,
    pub signals: Vec<SignalPhase>,
    pub trigger: Option<TriggerSpec>,
    /// Vehicle or obstacle id the TTC is evaluated against.
    pub counterpart: Option<String>,
}

impl Scenario {
    pub fn validate(&self, network: &RoadNetwork) -> Result<()> {
        let mut ids = std::collections::BTreeSet::new();
        for id in self.egos.iter().map(|e| &e.id).chain(self.npcs.iter().map(|n| &n.id)) {
            if !ids.insert(id.as_str()) {
                return Err(Error::Config(format!("duplicate vehicle id `{id}`")));
            }
        }
        for e in &self.egos {
            e.state.validate()?;
            e.params.validate()?;
            match &e.controller.lateral {
                Lateral::PurePursuit { lookahead } => {
                    if e.path.is_empty() {
                        return Err(Error::Validation(format!("ego `{}` uses pure pursuit but has no path", e.id)));
                    }
                    if !(*lookahead > 0.0) {
                        return Err(Error::Validation(format!("ego `{}` lookahead must be > 0", e.id)));
                    }
                }
                Lateral::Constant { steer } => {
                    if steer.abs() > e.params.delta_max {
                        return Err(Error::Validation(format!("ego `{}` steer exceeds delta_max", e.id)));
                    }
                }
            }
            if let Longitudinal::Scripted(cmds) = &e.controller.longitudinal {
                if cmds.is_empty() {
                    return Err(Error::Validation(format!("ego `{}` has an empty control timeline", e.id)));
                }
                for c in cmds {
                    c.validate()?;
                }
                if cmds.windows(2).any(|w| w[1].t <= w[0].t) {
                    return Err(Error::Validation(format!("ego `{}` timeline times must increase", e.id)));
                }
            }
        }
        for n in &self.npcs {
            n.params.validate()?;
            crate::traffic::validate_route(network, &n.route)?;
            if n.lane_index >= n.route.len() || n.s < 0.0 || n.v < 0.0 {
                return Err(Error::Validation(format!("npc `{}` has an invalid placement", n.id)));
            }
        }
        self.demand.validate(network)?;
        for s in &self.signals {
            s.validate(network)?;
        }
        if let Some(TriggerSpec::JunctionEntry { junction }) = &self.trigger {
            if network.junction(junction).is_none() {
                return Err(Error::Config(format!("trigger references unknown junction `{junction}`")));
            }
        }
        if let Some(c) = &self.counterpart {
            if !ids.contains(c.as_str()) && network.obstacle(c).is_none() {
                return Err(Error::Config(format!("counterpart `{c}` is neither a vehicle nor an obstacle")));
            }
        }
        if self.trigger.is_some() && self.egos.is_empty() {
            return Err(Error::Config("a trigger needs at least one ego".into()));
        }
        Ok(())
    }
}
