use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::road::{cross_road, route_path, straight_road, CrossRoad, StraightRoad};
use crate::cosim::{EgoController, EgoVehicle, Scenario, SimConfig, TriggerSpec};
use crate::dynamics::{VehicleParams, VehicleState};
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::roadnet::{ObstacleRegion, RoadNetwork};
use crate::traffic::{DemandSpec, NpcParams, NpcVehicle, SignalPhase};

pub const DEFAULT_SCENARIO_HORIZON: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RoadSpec {
    Straight(StraightRoad),
    Cross(CrossRoad),
    /// Path of a road network JSON file, relative to the scenario file.
    File(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StartSpec {
    /// On a lane centerline, heading along the lane.
    Lane { lane: String, s: f64, v: f64 },
    State(VehicleState),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    /// Lane ids in driving order; gaps between lanes are bridged by smooth
    /// connectors.
    Route(Vec<String>),
    Points(Vec<Point2>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoSpec {
    pub id: String,
    pub start: StartSpec,
    #[serde(default)]
    pub params: VehicleParams,
    #[serde(default)]
    pub path: Option<PathSpec>,
    pub controller: EgoController,
    #[serde(default)]
    pub tire_friction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NpcPlacement {
    pub id: String,
    pub route: Vec<String>,
    #[serde(default)]
    pub lane_index: usize,
    pub s: f64,
    pub v: f64,
    #[serde(default)]
    pub params: NpcParams,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NpcSection {
    pub placements: Vec<NpcPlacement>,
    pub demand: DemandSpec,
}

/// A scenario document: road, vehicles, trigger and horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub id: String,
    pub road: RoadSpec,
    pub egos: Vec<EgoSpec>,
    #[serde(default)]
    pub npcs: NpcSection,
    #[serde(default)]
    pub signals: Vec<SignalPhase>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleRegion>,
    #[serde(default)]
    pub trigger: Option<TriggerSpec>,
    #[serde(default)]
    pub counterpart: Option<String>,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
}

fn default_horizon() -> f64 {
    DEFAULT_SCENARIO_HORIZON
}

fn check_id(kind: &str, id: &str) -> Result<()> {
    if id.is_empty() || id.starts_with('*') || id.chars().any(|c| matches!(c, ',' | ';' | '"' | '\n' | '\r')) {
        return Err(Error::Validation(format!(
            "{kind} id `{id}` must be non-empty, must not start with `*` and must not contain `,` `;` quotes or newlines"
        )));
    }
    Ok(())
}

/// Parses, validates and resolves a scenario document. Generated roads are
/// built to check every reference; file roads are checked when run.
pub fn load_scenario(document: &str) -> Result<ScenarioSpec> {
    let spec = ScenarioSpec::from_json(document)?;
    spec.validate_document()?;
    if !matches!(spec.road, RoadSpec::File(_)) {
        let net = spec.build_network(None)?;
        spec.resolve(&net)?;
    }
    Ok(spec)
}

impl ScenarioSpec {
    /// Schema-level parse only; errors carry the JSON path of the field.
    pub fn from_json(document: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(document);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::json(format!("scenario at `{path}`"), e.into_inner())
        })
    }

    /// The document with every default filled in.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            horizon: self.horizon,
            ..SimConfig::default()
        }
    }

    /// Checks that need no road network.
    pub fn validate_document(&self) -> Result<()> {
        check_id("scenario", &self.id)?;
        if self.egos.is_empty() {
            return Err(Error::Validation(format!("scenario `{}` needs at least one ego", self.id)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Validation(format!("horizon {} must be a positive number", self.horizon)));
        }
        for e in &self.egos {
            check_id("vehicle", &e.id)?;
            if let StartSpec::Lane { v, .. } = &e.start {
                if !(*v >= 0.0) {
                    return Err(Error::Validation(format!("ego `{}` initial speed {v} must be >= 0", e.id)));
                }
            }
            if let Some(mu) = e.tire_friction {
                if !(mu > 0.0 && mu.is_finite()) {
                    return Err(Error::Validation(format!("ego `{}` tire_friction must be > 0", e.id)));
                }
            }
        }
        for n in &self.npcs.placements {
            check_id("vehicle", &n.id)?;
        }
        for o in &self.obstacles {
            check_id("obstacle", &o.id)?;
        }
        Ok(())
    }

    /// Builds the road and appends the scenario's obstacles.
    pub fn build_network(&self, base_dir: Option<&Path>) -> Result<RoadNetwork> {
        let mut net = match &self.road {
            RoadSpec::Straight(s) => straight_road(s)?,
            RoadSpec::Cross(c) => cross_road(c)?,
            RoadSpec::File(f) => {
                let path = match base_dir {
                    Some(d) => d.join(f),
                    None => Path::new(f).to_path_buf(),
                };
                RoadNetwork::load(&path).map_err(|e| match e {
                    Error::Io(io) => Error::Config(format!("cannot read road file `{}`: {io}", path.display())),
                    other => other,
                })?
            }
        };
        for o in &self.obstacles {
            if net.obstacle(&o.id).is_some() {
                return Err(Error::Validation(format!("obstacle id `{}` is already used by the road", o.id)));
            }
            net.obstacles.push(o.clone());
        }
        net.validate()?;
        Ok(net)
    }

    /// Turns the document into a runnable scenario on `network`, resolving
    /// every lane, junction and vehicle reference.
    pub fn resolve(&self, network: &RoadNetwork) -> Result<Scenario> {
        self.validate_document()?;
        let mut egos = Vec::with_capacity(self.egos.len());
        for e in &self.egos {
            egos.push(resolve_ego(e, network)?);
        }
        let npcs = self
            .npcs
            .placements
            .iter()
            .map(|p| {
                let mut n = NpcVehicle::new(p.id.clone(), p.route.clone(), p.s, p.v, p.params);
                n.lane_index = p.lane_index;
                n
            })
            .collect();
        let scenario = Scenario {
            id: self.id.clone(),
            egos,
            npcs,
            demand: self.npcs.demand.clone(),
            signals: self.signals.clone(),
            trigger: self.trigger.clone(),
            counterpart: self.counterpart.clone(),
        };
        scenario.validate(network)?;

        if let Some(TriggerSpec::JunctionEntry { junction }) = &self.trigger {
            if network.junction(junction).is_none() {
                return Err(Error::Config(format!("trigger references unknown junction `{junction}`")));
            }
        }
        if let Some(cp) = &self.counterpart {
            let vehicles: BTreeSet<&str> = scenario
                .egos
                .iter()
                .map(|e| e.id.as_str())
                .chain(scenario.npcs.iter().map(|n| n.id.as_str()))
                .collect();
            let spawned = cp.starts_with("npc") && scenario.demand.entries.iter().map(|d| d.count).sum::<usize>() > 0;
            if !vehicles.contains(cp.as_str()) && network.obstacle(cp).is_none() && !spawned {
                return Err(Error::Config(format!("counterpart `{cp}` is not a vehicle or obstacle in the scenario")));
            }
            if scenario.egos.first().is_some_and(|e| &e.id == cp) {
                return Err(Error::Config(format!("counterpart `{cp}` is the trigger ego itself")));
            }
        }
        Ok(scenario)
    }
}

fn resolve_ego(e: &EgoSpec, network: &RoadNetwork) -> Result<EgoVehicle> {
    let state = match &e.start {
        StartSpec::Lane { lane, s, v } => {
            let l = network
                .lane(lane)
                .ok_or_else(|| Error::Config(format!("ego `{}` starts on unknown lane `{lane}`", e.id)))?;
            let p = l.pose_at(l.start_s() + s)?;
            VehicleState {
                x: p.x,
                y: p.y,
                z: p.z,
                psi: p.heading,
                v: *v,
            }
        }
        StartSpec::State(s) => *s,
    };
    state.validate()?;
    let path = match &e.path {
        None => Vec::new(),
        Some(PathSpec::Points(p)) => p.clone(),
        Some(PathSpec::Route(r)) => route_path(network, r).map_err(|err| match err {
            Error::Config(m) => Error::Config(format!("ego `{}` path: {m}", e.id)),
            other => other,
        })?,
    };
    Ok(EgoVehicle {
        id: e.id.clone(),
        state,
        params: e.params.clone(),
        path,
        controller: e.controller.clone(),
        tire_friction: e.tire_friction,
    })
}
