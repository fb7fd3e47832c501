use serde::{Deserialize, Serialize};

use crate::dynamics::{FeedbackGains, VehicleState};
use crate::error::{Error, Result};
use crate::geom;
use crate::roadnet::{Lane, RoadNetwork};

/// Car-following parameters of a background vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NpcParams {
    pub v_des: f64,
    /// Desired time gap T (s).
    #[serde(alias = "T")]
    pub time_gap: f64,
    /// Standstill gap (m).
    pub s0: f64,
    pub a_max: f64,
    pub b_max: f64,
    pub length: f64,
    pub width: f64,
    pub wheelbase: f64,
    pub k_s: f64,
    pub k_v: f64,
    pub k_f: f64,
}

impl Default for NpcParams {
    fn default() -> Self {
        NpcParams {
            v_des: 13.89,
            time_gap: 1.0,
            s0: 2.5,
            a_max: 2.5,
            b_max: 4.5,
            length: 4.7,
            width: 1.85,
            wheelbase: 2.7,
            k_s: 0.5,
            k_v: 1.0,
            k_f: 0.5,
        }
    }
}

impl NpcParams {
    pub fn gains(&self) -> FeedbackGains {
        FeedbackGains {
            k_s: self.k_s,
            k_v: self.k_v,
            k_f: self.k_f,
            s0: self.s0,
            time_gap: self.time_gap,
            v_des: self.v_des,
            a_max: self.a_max,
            b_max: self.b_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.v_des >= 0.0, "v_des must be >= 0"),
            (self.time_gap >= 0.0, "T must be >= 0"),
            (self.s0 >= 0.0, "s0 must be >= 0"),
            (self.a_max >= 0.0 && self.b_max > 0.0, "a_max must be >= 0 and b_max > 0"),
            (self.length > 0.0 && self.width > 0.0, "length and width must be > 0"),
            (self.wheelbase > 0.0 && self.wheelbase <= self.length, "wheelbase must lie in (0, length]"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::Validation(format!("npc params: {msg}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpcVehicle {
    pub id: String,
    pub route: Vec<String>,
    pub lane_index: usize,
    /// Arc length from the start of the current lane; values past the lane
    /// length place the vehicle on the straight connector to the next lane.
    pub s: f64,
    pub v: f64,
    /// Acceleration applied over the last step.
    #[serde(default)]
    pub accel: f64,
    pub params: NpcParams,
    /// Set after a collision: the vehicle no longer moves.
    #[serde(default)]
    pub frozen: bool,
}

impl NpcVehicle {
    pub fn new(id: impl Into<String>, route: Vec<String>, s: f64, v: f64, params: NpcParams) -> Self {
        NpcVehicle {
            id: id.into(),
            route,
            lane_index: 0,
            s,
            v,
            accel: 0.0,
            params,
            frozen: false,
        }
    }

    pub fn lane(&self) -> &str {
        &self.route[self.lane_index]
    }
}

/// Geometry of a route: its lanes and the arc offset at which each starts.
/// Consecutive lanes that do not touch are joined by a straight chord.
pub struct RouteView<'a> {
    pub lanes: Vec<&'a Lane>,
    pub offsets: Vec<f64>,
    /// Lane length plus the connector chord to the next lane.
    pub spans: Vec<f64>,
}

const TOUCH_TOLERANCE: f64 = 1e-6;

impl<'a> RouteView<'a> {
    pub fn new(network: &'a RoadNetwork, route: &[String]) -> Result<Self> {
        if route.is_empty() {
            return Err(Error::Config("route is empty".into()));
        }
        let lanes = route
            .iter()
            .map(|id| network.lane(id).ok_or_else(|| Error::Config(format!("route references unknown lane `{id}`"))))
            .collect::<Result<Vec<_>>>()?;
        let mut offsets = Vec::with_capacity(lanes.len());
        let mut spans = Vec::with_capacity(lanes.len());
        let mut acc = 0.0;
        for (k, lane) in lanes.iter().enumerate() {
            offsets.push(acc);
            let chord = lanes
                .get(k + 1)
                .map(|next| {
                    let d = geom::dist(lane.last().xy(), next.first().xy());
                    if d > TOUCH_TOLERANCE {
                        d
                    } else {
                        0.0
                    }
                })
                .unwrap_or(0.0);
            spans.push(lane.length() + chord);
            acc += lane.length() + chord;
        }
        Ok(RouteView { lanes, offsets, spans })
    }

    pub fn arc(&self, lane_index: usize, s: f64) -> f64 {
        self.offsets[lane_index] + s
    }

    pub fn total_length(&self) -> f64 {
        self.offsets.last().copied().unwrap_or(0.0) + self.lanes.last().map_or(0.0, |l| l.length())
    }

    /// Position, heading, slope and curvature at a route location.
    pub fn pose(&self, lane_index: usize, s: f64) -> RoutePose {
        let lane = self.lanes[lane_index];
        let len = lane.length();
        if s <= len || lane_index + 1 >= self.lanes.len() {
            let p = lane.pose_clamped(lane.start_s() + s);
            return RoutePose {
                x: p.x,
                y: p.y,
                z: p.z,
                heading: p.heading,
                slope: p.slope,
                curvature: p.curvature,
            };
        }
        let (a, b) = (lane.last(), self.lanes[lane_index + 1].first());
        let chord = self.spans[lane_index] - len;
        let t = ((s - len) / chord).clamp(0.0, 1.0);
        let dz = b.z - a.z;
        RoutePose {
            x: a.x + t * (b.x - a.x),
            y: a.y + t * (b.y - a.y),
            z: a.z + t * dz,
            heading: (b.y - a.y).atan2(b.x - a.x),
            slope: dz.atan2(chord),
            curvature: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoutePose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub heading: f64,
    pub slope: f64,
    pub curvature: f64,
}

/// Lanes `a -> b` are chained when `b` is a successor of `a` or a junction
/// connects them.
pub fn lanes_chained(network: &RoadNetwork, a: &str, b: &str) -> bool {
    network.lane(a).is_some_and(|l| l.successors.iter().any(|s| s == b))
        || network
            .junctions
            .iter()
            .any(|j| j.connections.iter().any(|c| c.from == a && c.to == b))
}

pub fn validate_route(network: &RoadNetwork, route: &[String]) -> Result<()> {
    RouteView::new(network, route)?;
    for w in route.windows(2) {
        if !lanes_chained(network, &w[0], &w[1]) {
            return Err(Error::Config(format!("route lanes `{}` -> `{}` are not connected", w[0], w[1])));
        }
    }
    Ok(())
}

/// Planar state of an NPC plus the slope under it and the lane curvature.
pub fn npc_kinematics(network: &RoadNetwork, npc: &NpcVehicle) -> Result<(VehicleState, f64, f64)> {
    let view = RouteView::new(network, &npc.route)?;
    let p = view.pose(npc.lane_index, npc.s);
    Ok((VehicleState::new(p.x, p.y, p.z, p.heading, npc.v), p.slope, p.curvature))
}
