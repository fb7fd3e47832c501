use std::collections::BTreeSet;

use crate::dynamics::{
    cruise_control, pedal_to_accel, project_on_path, pure_pursuit_steering, rk4_step, ControlInput, PursuitCommand,
    VehicleParams, VehicleState,
};
use crate::error::{Error, Result};
use crate::geom::{self, Point2};
use crate::roadnet::{ObstacleRegion, RoadNetwork, SlopeField, DEFAULT_PROJECTION_TOLERANCE};
use crate::safety::{high_fidelity_ttc, margin_gr, margin_gv, traditional_ttc_against, Counterpart, ScenarioMetrics, TtcParty};
use crate::traffic::{npc_kinematics, npc_step, NpcParams, NpcVehicle, Spawner, LEADER_HORIZON};

use super::setup::{EgoVehicle, Lateral, Longitudinal, Scenario, SimConfig, TriggerSpec};
use super::trace::{CollisionEvent, StepRecord, TraceLog, TriggerEvent, VehicleRecord, Warning};

/// Lateral distance within which a vehicle counts as being on an ego's path.
pub const PATH_LEADER_TOLERANCE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EgoStatus {
    Active,
    Collided,
    Finished,
}

#[derive(Debug, Clone)]
pub struct EgoRuntime {
    pub vehicle: EgoVehicle,
    pub status: EgoStatus,
    omega_warned: bool,
}

/// A vehicle at the start of a macro step, with the control it applies
/// over that step.
#[derive(Debug, Clone, PartialEq)]
pub struct Body {
    pub id: String,
    pub state: VehicleState,
    pub control: ControlInput,
    pub params: VehicleParams,
    pub theta: f64,
}

impl Body {
    /// Planar velocity including the slope foreshortening.
    pub fn velocity(&self) -> Point2 {
        let c = self.theta.cos();
        [self.state.v * self.state.psi.cos() * c, self.state.v * self.state.psi.sin() * c]
    }

    fn record(&self) -> VehicleRecord {
        VehicleRecord {
            vehicle_id: self.id.clone(),
            x: self.state.x,
            y: self.state.y,
            z: self.state.z,
            psi: self.state.psi,
            v: self.state.v,
            a_cmd: self.control.accel,
            steer: self.control.steer,
        }
    }

    fn party(&self) -> TtcParty {
        TtcParty {
            id: self.id.clone(),
            state: self.state,
            control: self.control,
            params: self.params.clone(),
        }
    }
}

/// Single-track parameters standing in for an NPC in the TTC predictor.
pub fn npc_vehicle_params(p: &NpcParams) -> VehicleParams {
    VehicleParams {
        length: p.length,
        width: p.width,
        wheelbase: p.wheelbase,
        a_max: p.a_max,
        b_max: p.b_max,
        ..VehicleParams::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contact {
    pub participants: (String, String),
    pub impact_speed: f64,
    pub location: [f64; 3],
}

/// Disc contacts between vehicles and between vehicles and regions.
pub fn collision_check(bodies: &[Body], obstacles: &[ObstacleRegion]) -> Vec<Contact> {
    let mut out = Vec::new();
    for (i, a) in bodies.iter().enumerate() {
        for b in &bodies[i + 1..] {
            if margin_gv(a.state.position(), b.state.position(), a.params.length, b.params.length) <= 0.0 {
                let dv = geom::sub(a.velocity(), b.velocity());
                out.push(Contact {
                    participants: (a.id.clone(), b.id.clone()),
                    impact_speed: geom::norm(dv),
                    location: [
                        (a.state.x + b.state.x) / 2.0,
                        (a.state.y + b.state.y) / 2.0,
                        (a.state.z + b.state.z) / 2.0,
                    ],
                });
            }
        }
        for o in obstacles {
            if margin_gr(a.state.position(), o, a.params.length) <= 0.0 {
                out.push(Contact {
                    participants: (a.id.clone(), o.id.clone()),
                    impact_speed: geom::norm(a.velocity()),
                    location: [a.state.x, a.state.y, a.state.z],
                });
            }
        }
    }
    out
}

/// Radius of a junction: farthest endpoint from the centroid plus half of
/// that lane's width.
pub fn junction_radius(network: &RoadNetwork, junction: &str) -> Result<f64> {
    let j = network
        .junction(junction)
        .ok_or_else(|| Error::Config(format!("unknown junction `{junction}`")))?;
    let c = [j.centroid[0], j.centroid[1]];
    let mut r: f64 = 0.0;
    for link in &j.endpoint_links {
        let lane = network
            .lane(&link.lane)
            .ok_or_else(|| Error::Config(format!("junction `{junction}` links unknown lane `{}`", link.lane)))?;
        let end = match link.end {
            crate::roadnet::LaneEnd::Start => lane.first(),
            crate::roadnet::LaneEnd::End => lane.last(),
        };
        r = r.max(geom::dist(c, end.xy()) + lane.width / 2.0);
    }
    Ok(r)
}

/// Whether the trigger condition holds for an ego record.
pub fn trigger_fires(spec: &TriggerSpec, record: &VehicleRecord, network: &RoadNetwork) -> Result<bool> {
    Ok(match spec {
        TriggerSpec::DecelOnset { threshold } => record.a_cmd <= -threshold,
        TriggerSpec::JunctionEntry { junction } => {
            let j = network
                .junction(junction)
                .ok_or_else(|| Error::Config(format!("unknown junction `{junction}`")))?;
            geom::dist([record.x, record.y], [j.centroid[0], j.centroid[1]]) <= junction_radius(network, junction)?
        }
    })
}

/// First step time at which the trigger fires for `ego` in a recorded trace.
pub fn detect_trigger(log: &TraceLog, spec: &TriggerSpec, ego: &str, network: &RoadNetwork) -> Result<Option<f64>> {
    for step in &log.steps {
        if let Some(r) = step.vehicles.iter().find(|r| r.vehicle_id == ego) {
            if trigger_fires(spec, r, network)? {
                return Ok(Some(step.time));
            }
        }
    }
    Ok(None)
}

/// Nearest vehicle ahead along a path polyline: `(gap, speed along path)`.
pub fn path_leader(me: &Body, path: &[Point2], others: &[&Body]) -> Option<(f64, f64)> {
    if path.len() < 2 {
        return None;
    }
    let (s_me, _, _) = project_on_path(path, me.state.position());
    let mut best: Option<(f64, f64, f64)> = None;
    for o in others {
        let (s_o, seg, d) = project_on_path(path, o.state.position());
        let ahead = s_o - s_me;
        if d > PATH_LEADER_TOLERANCE || ahead <= 0.0 || ahead > LEADER_HORIZON {
            continue;
        }
        if best.is_none_or(|b| ahead < b.0) {
            let dir = geom::sub(path[seg + 1], path[seg]);
            let along = (o.state.psi - dir[1].atan2(dir[0])).cos() * o.state.v;
            best = Some((ahead, (me.params.length + o.params.length) / 2.0, along));
        }
    }
    best.map(|(ahead, half_sum, v)| (ahead - half_sum, v))
}

pub struct World<'a> {
    pub network: &'a RoadNetwork,
    pub scenario: &'a Scenario,
    pub config: SimConfig,
    pub step: u64,
    pub egos: Vec<EgoRuntime>,
    pub npcs: Vec<NpcVehicle>,
    spawner: Spawner,
    collided: BTreeSet<(String, String)>,
    pending_ttc: Option<(f64, String, String)>,
    pub log: TraceLog,
}

impl<'a> World<'a> {
    pub fn new(network: &'a RoadNetwork, scenario: &'a Scenario, config: &SimConfig) -> Result<Self> {
        config.validate()?;
        scenario.validate(network)?;
        Ok(World {
            network,
            scenario,
            config: config.clone(),
            step: 0,
            egos: scenario
                .egos
                .iter()
                .map(|e| EgoRuntime {
                    vehicle: e.clone(),
                    status: EgoStatus::Active,
                    omega_warned: false,
                })
                .collect(),
            npcs: scenario.npcs.clone(),
            spawner: Spawner::new(&scenario.demand, config.seed),
            collided: BTreeSet::new(),
            pending_ttc: None,
            log: TraceLog {
                scenario: scenario.id.clone(),
                macro_dt: config.macro_dt,
                ..Default::default()
            },
        })
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.config.macro_dt
    }

    pub fn all_egos_done(&self) -> bool {
        !self.egos.is_empty() && self.egos.iter().all(|e| e.status != EgoStatus::Active)
    }

    fn friction_at(&self, ego: &EgoVehicle) -> f64 {
        ego.tire_friction.unwrap_or_else(|| {
            self.network
                .pose_under(ego.state.position(), DEFAULT_PROJECTION_TOLERANCE)
                .map(|p| p.friction)
                .unwrap_or(1.0)
        })
    }

    /// Control for one ego from the current snapshot; `None` when its path
    /// is exhausted.
    fn ego_control(&mut self, i: usize, bodies: &[Body], t: f64) -> Result<Option<ControlInput>> {
        let ego = &self.egos[i].vehicle;
        let s = ego.state;
        let steer = match &ego.controller.lateral {
            Lateral::PurePursuit { lookahead } => {
                match pure_pursuit_steering(&s, &ego.path, *lookahead, ego.params.wheelbase, ego.params.delta_max) {
                    PursuitCommand::Steer(d) => d,
                    PursuitCommand::PathExhausted => return Ok(None),
                }
            }
            Lateral::Constant { steer } => *steer,
        };
        let accel = match &ego.controller.longitudinal {
            Longitudinal::Feedback(gains) => {
                let me = &bodies[i];
                let others: Vec<&Body> = bodies.iter().filter(|b| b.id != ego.id).collect();
                cruise_control(path_leader(me, &ego.path, &others), s.v, gains)
            }
            Longitudinal::Scripted(_) => match ego.controller.scripted_at(t) {
                None => 0.0,
                Some((cmd, _)) => match cmd.accel {
                    Some(a) => a,
                    None => {
                        let theta = self.network.slope(s.x, s.y);
                        let mu = self.friction_at(ego);
                        let r = pedal_to_accel(
                            cmd.throttle.unwrap_or(0.0),
                            cmd.brake.unwrap_or(0.0),
                            steer,
                            &s,
                            &ego.params,
                            mu,
                            theta,
                        )?;
                        if r.omega_clamped && !self.egos[i].omega_warned {
                            self.egos[i].omega_warned = true;
                            self.log.warnings.push(Warning {
                                time: t,
                                vehicle: self.egos[i].vehicle.id.clone(),
                                message: "engine speed clamped to omega_max".into(),
                            });
                        }
                        r.accel
                    }
                },
            },
        };
        Ok(Some(self.egos[i].vehicle.params.clamp_control(ControlInput::new(accel, steer))))
    }

    fn npc_body(&self, npc: &NpcVehicle, accel: f64) -> Result<Body> {
        let (state, theta, kappa) = npc_kinematics(self.network, npc)?;
        Ok(Body {
            id: npc.id.clone(),
            state,
            control: ControlInput::new(accel, (npc.params.wheelbase * kappa).atan()),
            params: npc_vehicle_params(&npc.params),
            theta,
        })
    }

    /// Advance one macro step. Returns the collision events it produced.
    pub fn engine_step(&mut self) -> Result<Vec<CollisionEvent>> {
        let k = self.step;
        let dt = self.config.macro_dt;
        let t = self.time();

        let spawned = self.spawner.spawn(&self.scenario.demand, t, self.network, &self.npcs)?;
        self.npcs.extend(spawned);

        let next_npcs = npc_step(self.network, &self.npcs, &self.scenario.signals, t, dt)?;

        let mut bodies: Vec<Body> = self
            .egos
            .iter()
            .map(|e| Body {
                id: e.vehicle.id.clone(),
                state: e.vehicle.state,
                control: ControlInput::default(),
                params: e.vehicle.params.clone(),
                theta: self.network.slope(e.vehicle.state.x, e.vehicle.state.y),
            })
            .collect();
        let mut npc_sorted: Vec<&NpcVehicle> = self.npcs.iter().collect();
        npc_sorted.sort_by(|a, b| a.id.cmp(&b.id));
        for npc in npc_sorted {
            let accel = next_npcs
                .iter()
                .find(|n| n.id == npc.id)
                .map_or(npc.accel, |n| n.accel);
            bodies.push(self.npc_body(npc, accel)?);
        }

        let mut exhausted = vec![false; self.egos.len()];
        for i in 0..self.egos.len() {
            if self.egos[i].status != EgoStatus::Active {
                continue;
            }
            match self.ego_control(i, &bodies, t)? {
                Some(u) => bodies[i].control = u,
                None => exhausted[i] = true,
            }
        }

        self.log.steps.push(StepRecord {
            step: k,
            time: t,
            vehicles: bodies.iter().map(Body::record).collect(),
        });

        if self.log.trigger.is_none() {
            self.evaluate_trigger(&bodies, k, t)?;
        }

        let h = dt / f64::from(self.config.micro_substeps);
        for (i, ego) in self.egos.iter_mut().enumerate() {
            if ego.status != EgoStatus::Active {
                continue;
            }
            if exhausted[i] {
                ego.status = EgoStatus::Finished;
                ego.vehicle.state.v = 0.0;
                continue;
            }
            let u = bodies[i].control;
            let mut s = ego.vehicle.state;
            for _ in 0..self.config.micro_substeps {
                s = rk4_step(&s, &u, self.network, &ego.vehicle.params, h).map_err(|_| Error::NonFinite {
                    vehicle: ego.vehicle.id.clone(),
                    step: k,
                })?;
            }
            if !s.is_finite() {
                return Err(Error::NonFinite {
                    vehicle: ego.vehicle.id.clone(),
                    step: k,
                });
            }
            ego.vehicle.state = s;
            let last_cmd = ego.vehicle.controller.scripted_at(t).is_some_and(|(_, last)| last);
            if last_cmd && s.v == 0.0 && u.accel < 0.0 {
                ego.status = EgoStatus::Finished;
            }
        }
        self.npcs = next_npcs;

        self.step += 1;
        self.detect_collisions()
    }

    fn evaluate_trigger(&mut self, bodies: &[Body], k: u64, t: f64) -> Result<()> {
        let (Some(spec), Some(ego)) = (&self.scenario.trigger, self.egos.first()) else {
            return Ok(());
        };
        if ego.status != EgoStatus::Active {
            return Ok(());
        }
        let me = &bodies[0];
        if !trigger_fires(spec, &me.record(), self.network)? {
            return Ok(());
        }
        self.log.trigger = Some(TriggerEvent {
            time: t,
            step: k,
            ego: me.id.clone(),
            counterpart: self.scenario.counterpart.clone(),
            location: [me.state.x, me.state.y, me.state.z],
        });
        let Some(cid) = &self.scenario.counterpart else {
            return Ok(());
        };
        let counterpart = if let Some(b) = bodies.iter().find(|b| &b.id == cid) {
            Counterpart::Vehicle(b.party())
        } else if let Some(o) = self.network.obstacle(cid) {
            Counterpart::Obstacle(o.clone())
        } else {
            return Err(Error::Config(format!("counterpart `{cid}` is not present at the trigger")));
        };
        let ego_party = me.party();
        let trad = traditional_ttc_against(&ego_party, &counterpart, self.config.ttc.horizon, t);
        let hf = high_fidelity_ttc(&ego_party, &counterpart, self.network, &self.config.ttc, t)?;
        self.log.ttc.push(trad);
        self.log.ttc.push(hf);
        self.pending_ttc = Some((t, me.id.clone(), cid.clone()));
        Ok(())
    }

    fn detect_collisions(&mut self) -> Result<Vec<CollisionEvent>> {
        let mut bodies: Vec<Body> = self
            .egos
            .iter()
            .map(|e| Body {
                id: e.vehicle.id.clone(),
                state: e.vehicle.state,
                control: ControlInput::default(),
                params: e.vehicle.params.clone(),
                theta: self.network.slope(e.vehicle.state.x, e.vehicle.state.y),
            })
            .collect();
        for npc in &self.npcs {
            bodies.push(self.npc_body(npc, npc.accel)?);
        }
        let t = self.time();
        let mut events = Vec::new();
        for c in collision_check(&bodies, &self.network.obstacles) {
            let (a, b) = &c.participants;
            let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            if !self.collided.insert(key) {
                continue;
            }
            for id in [a, b] {
                if let Some(e) = self.egos.iter_mut().find(|e| &e.vehicle.id == id) {
                    e.status = EgoStatus::Collided;
                    e.vehicle.state.v = 0.0;
                }
                if let Some(n) = self.npcs.iter_mut().find(|n| &n.id == id) {
                    n.frozen = true;
                    n.v = 0.0;
                    n.accel = 0.0;
                }
            }
            events.push(CollisionEvent {
                time: t,
                participants: c.participants.clone(),
                impact_speed: c.impact_speed,
                location: c.location,
            });
        }
        self.log.collisions.extend(events.iter().cloned());
        Ok(events)
    }

    /// Close the log, attaching the TTC comparison if a trigger fired.
    pub fn finish(mut self) -> TraceLog {
        if let Some((t, ego, cid)) = self.pending_ttc.take() {
            let value = |m| {
                self.log
                    .ttc
                    .iter()
                    .find(|r| r.method == m)
                    .and_then(|r| r.value)
            };
            self.log.metrics = Some(ScenarioMetrics {
                scenario: self.scenario.id.clone(),
                traditional: value(crate::safety::TtcMethod::Traditional),
                simulated: self.log.contact_time(&ego, &cid).map(|c| c - t),
                high_fidelity: value(crate::safety::TtcMethod::HighFidelity),
            });
        }
        self.log
    }
}

/// Run a scenario until the horizon or until every ego has collided or
/// finished.
pub fn run(network: &RoadNetwork, scenario: &Scenario, config: &SimConfig) -> Result<TraceLog> {
    let mut world = World::new(network, scenario, config)?;
    for _ in 0..config.step_count() {
        world.engine_step()?;
        if world.all_egos_done() {
            break;
        }
    }
    Ok(world.finish())
}
