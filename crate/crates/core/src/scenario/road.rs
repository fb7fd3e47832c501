use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, wrap_angle, Point2};
use crate::mapbuild::MAX_TURN;
use crate::roadnet::{Connection, EndpointLink, GeoOrigin, Junction, Lane, LaneEnd, RoadNetwork};

/// Centerline sample spacing of generated lanes (m).
const SAMPLE_SPACING: f64 = 1.0;
/// Spacing of connector points in route paths (m).
const CONNECTOR_SPACING: f64 = 0.5;
/// Bezier handle length as a fraction of the connector chord.
const HANDLE_FRACTION: f64 = 0.4;

/// Distance from the cross center to the near end of every arm lane (m).
pub const CROSS_INNER: f64 = 8.0;
/// Id of the single junction of a generated cross.
pub const CROSS_JUNCTION: &str = "J0";

/// One straight lane along +x. `grade` is the rise over run in the driving
/// direction, so negative values run downhill.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StraightRoad {
    pub length: f64,
    pub grade: f64,
    pub friction: f64,
    pub width: f64,
    pub lane_id: String,
}

impl Default for StraightRoad {
    fn default() -> Self {
        StraightRoad {
            length: 400.0,
            grade: 0.0,
            friction: 1.0,
            width: 3.5,
            lane_id: "L0".into(),
        }
    }
}

/// Flat four-arm intersection with one lane each way per arm, right-hand
/// traffic. Lanes are `N_in`, `N_out`, `E_in`, ... where `in` drives toward
/// the center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrossRoad {
    pub arm_length: f64,
    pub friction: f64,
    pub width: f64,
}

impl Default for CrossRoad {
    fn default() -> Self {
        CrossRoad {
            arm_length: 100.0,
            friction: 1.0,
            width: 3.5,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!("{name} {v} must be a positive number")))
    }
}

pub fn straight_road(spec: &StraightRoad) -> Result<RoadNetwork> {
    positive("road length", spec.length)?;
    positive("road friction", spec.friction)?;
    positive("lane width", spec.width)?;
    if !spec.grade.is_finite() {
        return Err(Error::Validation("road grade must be finite".into()));
    }
    let mut lane = Lane::from_polyline(
        spec.lane_id.clone(),
        spec.width,
        &[[0.0, 0.0], [spec.length, 0.0]],
        spec.friction,
        SAMPLE_SPACING,
    )?;
    let theta = spec.grade.atan();
    for c in &mut lane.samples {
        c.z = c.s * spec.grade;
        c.slope = theta;
    }
    RoadNetwork::new(GeoOrigin::default(), vec![lane], vec![], vec![])
}

pub fn cross_road(spec: &CrossRoad) -> Result<RoadNetwork> {
    positive("arm length", spec.arm_length)?;
    positive("road friction", spec.friction)?;
    positive("lane width", spec.width)?;
    if spec.arm_length <= CROSS_INNER {
        return Err(Error::Validation(format!("arm length must exceed {CROSS_INNER} m")));
    }
    let (near, far, off) = (CROSS_INNER, spec.arm_length, spec.width / 2.0);
    // Unit vector from the center out along each arm.
    let arms: [(&str, Point2); 4] = [("N", [0.0, 1.0]), ("E", [1.0, 0.0]), ("S", [0.0, -1.0]), ("W", [-1.0, 0.0])];
    let mut lanes = Vec::with_capacity(8);
    for (name, u) in arms {
        // Right-hand side for a vehicle driving inbound along -u.
        let right_in = [-u[1], u[0]];
        let at = |d: f64, side: f64| [u[0] * d + right_in[0] * side, u[1] * d + right_in[1] * side];
        lanes.push(Lane::from_polyline(
            format!("{name}_in"),
            spec.width,
            &[at(far, off), at(near, off)],
            spec.friction,
            SAMPLE_SPACING,
        )?);
        lanes.push(Lane::from_polyline(
            format!("{name}_out"),
            spec.width,
            &[at(near, -off), at(far, -off)],
            spec.friction,
            SAMPLE_SPACING,
        )?);
    }
    let mut links = Vec::with_capacity(8);
    let mut connections = Vec::new();
    for a in lanes.iter().filter(|l| l.id.ends_with("_in")) {
        links.push(EndpointLink {
            lane: a.id.clone(),
            end: LaneEnd::End,
        });
        for b in lanes.iter().filter(|l| l.id.ends_with("_out")) {
            if wrap_angle(b.first().heading - a.last().heading).abs() <= MAX_TURN {
                connections.push(Connection {
                    from: a.id.clone(),
                    to: b.id.clone(),
                });
            }
        }
    }
    for b in lanes.iter().filter(|l| l.id.ends_with("_out")) {
        links.push(EndpointLink {
            lane: b.id.clone(),
            end: LaneEnd::Start,
        });
    }
    for lane in &mut lanes {
        if lane.id.ends_with("_in") {
            lane.end_junction = Some(CROSS_JUNCTION.into());
            lane.successors = connections.iter().filter(|c| c.from == lane.id).map(|c| c.to.clone()).collect();
        } else {
            lane.start_junction = Some(CROSS_JUNCTION.into());
            lane.predecessors = connections.iter().filter(|c| c.to == lane.id).map(|c| c.from.clone()).collect();
        }
    }
    let junction = Junction {
        id: CROSS_JUNCTION.into(),
        centroid: [0.0; 3],
        endpoint_links: links,
        connections,
    };
    RoadNetwork::new(GeoOrigin::default(), lanes, vec![junction], vec![])
}

fn cubic_bezier(p: [Point2; 4], t: f64) -> Point2 {
    let u = 1.0 - t;
    let w = [u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t];
    [
        w.iter().zip(&p).map(|(w, q)| w * q[0]).sum(),
        w.iter().zip(&p).map(|(w, q)| w * q[1]).sum(),
    ]
}

/// Polyline through the centerlines of `route`, with cubic Bezier
/// connectors tangent to both lanes wherever consecutive lanes do not touch.
pub fn route_path(network: &RoadNetwork, route: &[String]) -> Result<Vec<Point2>> {
    if route.is_empty() {
        return Err(Error::Config("route is empty".into()));
    }
    let mut out: Vec<Point2> = Vec::new();
    let mut prev: Option<&Lane> = None;
    for id in route {
        let lane = network
            .lane(id)
            .ok_or_else(|| Error::Config(format!("unknown lane `{id}` in route")))?;
        if let Some(p) = prev {
            let (a, b) = (p.last(), lane.first());
            let chord = geom::dist(a.xy(), b.xy());
            if chord > 1e-6 {
                let h = HANDLE_FRACTION * chord;
                let ctrl = [
                    a.xy(),
                    [a.x + h * a.heading.cos(), a.y + h * a.heading.sin()],
                    [b.x - h * b.heading.cos(), b.y - h * b.heading.sin()],
                    b.xy(),
                ];
                let n = (chord / CONNECTOR_SPACING).ceil().max(2.0) as usize;
                for i in 1..n {
                    out.push(cubic_bezier(ctrl, i as f64 / n as f64));
                }
            }
        }
        for q in lane.polyline() {
            if out.last().is_none_or(|l| geom::dist(*l, q) > 1e-9) {
                out.push(q);
            }
        }
        prev = Some(lane);
    }
    Ok(out)
}
