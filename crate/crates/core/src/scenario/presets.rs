//! The eight reference collision scenarios. Each fixes its road, grade,
//! mass, friction and trigger rule. Initial gaps and speeds are chosen so
//! each scenario shows its intended outcome: a collision, or a stop short
//! of the lead vehicle.

use super::road::{CrossRoad, StraightRoad, CROSS_JUNCTION};
use super::spec::{EgoSpec, NpcPlacement, NpcSection, PathSpec, RoadSpec, ScenarioSpec, StartSpec};
use crate::cosim::{EgoController, Lateral, Longitudinal, TimedCommand, TriggerSpec, DEFAULT_DECEL_THRESHOLD};
use crate::dynamics::VehicleParams;
use crate::error::{Error, Result};
use crate::traffic::NpcParams;

pub const PRESET_IDS: [&str; 8] = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII"];

pub const EGO_ID: &str = "ego";
pub const NPC_ID: &str = "npc";

/// Downhill grade of the sloped rear-end scenarios.
pub const DOWNHILL_GRADE: f64 = -0.2;
/// Reference vehicle mass and the reduced mass of scenario III (kg).
pub const BASE_MASS: f64 = 1630.0;
pub const LIGHT_MASS: f64 = 1200.0;
/// Tire friction of the low-grip scenario II, 40% of the nominal 1.0.
pub const LOW_FRICTION: f64 = 0.4;

const REAR_END_EGO_S: f64 = 50.0;
const REAR_END_SPEED: f64 = 15.0;
/// Center distance from ego to the stopped lead vehicle.
const DOWNHILL_GAP: f64 = 47.0;
const FLAT_GAP: f64 = 34.0;

/// Coast, light braking at the trigger, then full braking.
const BRAKE_ONSET: f64 = 1.0;
const LIGHT_BRAKE: f64 = 0.3;
const FULL_BRAKE_AT: f64 = 1.5;

const LOOKAHEAD: f64 = 6.0;

fn pedal(t: f64, brake: f64) -> TimedCommand {
    TimedCommand {
        t,
        accel: None,
        throttle: Some(0.0),
        brake: Some(brake),
    }
}

fn braking_timeline() -> Vec<TimedCommand> {
    vec![pedal(0.0, 0.0), pedal(BRAKE_ONSET, LIGHT_BRAKE), pedal(FULL_BRAKE_AT, 1.0)]
}

fn rear_end(id: &str, grade: f64, gap: f64, mass: f64, tire_friction: Option<f64>) -> ScenarioSpec {
    let lead = NpcPlacement {
        id: NPC_ID.into(),
        route: vec!["L0".into()],
        lane_index: 0,
        s: REAR_END_EGO_S + gap,
        v: 0.0,
        params: NpcParams {
            v_des: 0.0,
            ..NpcParams::default()
        },
    };
    ScenarioSpec {
        id: id.into(),
        road: RoadSpec::Straight(StraightRoad {
            grade,
            ..StraightRoad::default()
        }),
        egos: vec![EgoSpec {
            id: EGO_ID.into(),
            start: StartSpec::Lane {
                lane: "L0".into(),
                s: REAR_END_EGO_S,
                v: REAR_END_SPEED,
            },
            params: VehicleParams {
                mass,
                ..VehicleParams::default()
            },
            path: None,
            controller: EgoController {
                longitudinal: Longitudinal::Scripted(braking_timeline()),
                lateral: Lateral::Constant { steer: 0.0 },
            },
            tire_friction,
        }],
        npcs: NpcSection {
            placements: vec![lead],
            demand: Default::default(),
        },
        signals: vec![],
        obstacles: vec![],
        trigger: Some(TriggerSpec::DecelOnset {
            threshold: DEFAULT_DECEL_THRESHOLD,
        }),
        counterpart: Some(NPC_ID.into()),
        horizon: 30.0,
    }
}

/// Ego and NPC at constant speed through the cross on the given routes.
/// `ego_s` and `npc_s` are start positions on the first route lane.
fn crossing(id: &str, ego_route: [&str; 2], ego: (f64, f64), npc_route: [&str; 2], npc: (f64, f64)) -> ScenarioSpec {
    let route = |r: [&str; 2]| r.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    ScenarioSpec {
        id: id.into(),
        road: RoadSpec::Cross(CrossRoad::default()),
        egos: vec![EgoSpec {
            id: EGO_ID.into(),
            start: StartSpec::Lane {
                lane: ego_route[0].into(),
                s: ego.0,
                v: ego.1,
            },
            params: VehicleParams::default(),
            path: Some(PathSpec::Route(route(ego_route))),
            controller: EgoController {
                longitudinal: Longitudinal::Scripted(vec![TimedCommand {
                    t: 0.0,
                    accel: Some(0.0),
                    throttle: None,
                    brake: None,
                }]),
                lateral: Lateral::PurePursuit { lookahead: LOOKAHEAD },
            },
            tire_friction: None,
        }],
        npcs: NpcSection {
            placements: vec![NpcPlacement {
                id: NPC_ID.into(),
                route: route(npc_route),
                lane_index: 0,
                s: npc.0,
                v: npc.1,
                params: NpcParams {
                    v_des: npc.1,
                    ..NpcParams::default()
                },
            }],
            demand: Default::default(),
        },
        signals: vec![],
        obstacles: vec![],
        trigger: Some(TriggerSpec::JunctionEntry {
            junction: CROSS_JUNCTION.into(),
        }),
        counterpart: Some(NPC_ID.into()),
        horizon: 30.0,
    }
}

/// The scenario document of a reference preset, `I` through `VIII`.
pub fn preset(id: &str) -> Result<ScenarioSpec> {
    Ok(match id {
        "I" => rear_end("I", DOWNHILL_GRADE, DOWNHILL_GAP, BASE_MASS, None),
        "II" => rear_end("II", DOWNHILL_GRADE, DOWNHILL_GAP, BASE_MASS, Some(LOW_FRICTION)),
        "III" => rear_end("III", DOWNHILL_GRADE, DOWNHILL_GAP, LIGHT_MASS, None),
        "IV" => rear_end("IV", 0.0, FLAT_GAP, BASE_MASS, None),
        // Right turn merging beside a through vehicle heading the same way.
        "V" => crossing("V", ["S_in", "E_out"], (62.0, 8.0), ["W_in", "E_out"], (56.0, 10.0)),
        // Left turn from the opposite side merging onto the same lane.
        "VI" => crossing("VI", ["N_in", "E_out"], (62.0, 8.0), ["W_in", "E_out"], (56.0, 10.0)),
        // Left turn across the path of an oncoming through vehicle.
        "VII" => crossing("VII", ["S_in", "W_out"], (62.0, 8.0), ["N_in", "S_out"], (56.0, 10.0)),
        // Straight through, perpendicular to a through vehicle.
        "VIII" => crossing("VIII", ["S_in", "N_out"], (62.0, 10.0), ["W_in", "E_out"], (62.0, 10.0)),
        other => {
            return Err(Error::Validation(format!(
                "unknown preset `{other}`; expected one of {}",
                PRESET_IDS.join(", ")
            )))
        }
    })
}
