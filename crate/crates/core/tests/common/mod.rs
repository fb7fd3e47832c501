//! Reference implementations shared by the integration tests. They are
//! written directly from the model equations, independent of the library
//! code they check.

#![allow(dead_code)]

use std::path::PathBuf;

use roadtwin::dynamics::{ControlInput, VehicleParams, VehicleState};
use roadtwin::mapbuild::Label;
use roadtwin::roadnet::{GeoOrigin, Lane, RoadNetwork};
use roadtwin::safety::TtcParty;
use roadtwin::traffic::{npc_step, NpcParams, NpcVehicle};

pub const G: f64 = 9.81;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

pub fn party(id: &str, state: VehicleState, accel: f64, steer: f64) -> TtcParty {
    TtcParty {
        id: id.into(),
        state,
        control: ControlInput::new(accel, steer),
        params: VehicleParams::default(),
    }
}

/// Single-track derivative on a uniform inclination `theta`.
fn derivative(y: [f64; 5], accel: f64, steer: f64, theta: f64, wheelbase: f64) -> [f64; 5] {
    let v = if y[4] > 0.0 { y[4] } else { 0.0 };
    let mut dv = accel - G * theta.sin();
    if v == 0.0 && dv < 0.0 {
        dv = 0.0;
    }
    [
        v * y[3].cos() * theta.cos(),
        v * y[3].sin() * theta.cos(),
        v * theta.sin(),
        v * steer.tan() / wheelbase,
        dv,
    ]
}

/// Classical RK4 step with the speed floored at zero afterwards.
pub fn oracle_step(y: [f64; 5], accel: f64, steer: f64, theta: f64, wheelbase: f64, h: f64) -> [f64; 5] {
    let f = |s: [f64; 5]| derivative(s, accel, steer, theta, wheelbase);
    let add = |s: [f64; 5], k: [f64; 5], c: f64| {
        let mut o = s;
        for i in 0..5 {
            o[i] += c * k[i];
        }
        o
    };
    let k1 = f(y);
    let k2 = f(add(y, k1, h / 2.0));
    let k3 = f(add(y, k2, h / 2.0));
    let k4 = f(add(y, k3, h));
    let mut out = y;
    for i in 0..5 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out[4] = out[4].max(0.0);
    out
}

fn as_array(s: &VehicleState) -> [f64; 5] {
    [s.x, s.y, s.z, s.psi, s.v]
}

fn point_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((p[0] - a[0] - t * dx).powi(2) + (p[1] - a[1] - t * dy).powi(2)).sqrt()
}

/// Distance from a point to a convex polygon, zero inside.
pub fn polygon_distance(p: [f64; 2], poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut sign = 0.0f64;
    let mut inside = true;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let c = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        if c != 0.0 {
            if sign == 0.0 {
                sign = c.signum();
            } else if c.signum() != sign {
                inside = false;
            }
        }
    }
    if inside {
        return 0.0;
    }
    (0..n).map(|i| point_segment(p, poly[i], poly[(i + 1) % n])).fold(f64::INFINITY, f64::min)
}

pub enum OracleTarget<'a> {
    Vehicle(&'a TtcParty),
    Polygon(&'a [[f64; 2]]),
}

/// First grid time at which the clearance is non-positive, integrating
/// both parties on a uniform grid of spacing `dt`.
pub fn brute_force_ttc(ego: &TtcParty, target: OracleTarget, theta: f64, dt: f64, horizon: f64) -> Option<f64> {
    let mut a = as_array(&ego.state);
    let mut b = match &target {
        OracleTarget::Vehicle(p) => Some(as_array(&p.state)),
        OracleTarget::Polygon(_) => None,
    };
    let clearance = |a: &[f64; 5], b: &Option<[f64; 5]>| match (&target, b) {
        (OracleTarget::Vehicle(p), Some(b)) => {
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt() - (ego.params.length + p.params.length) / 2.0
        }
        (OracleTarget::Polygon(poly), _) => polygon_distance([a[0], a[1]], poly) - ego.params.length / 2.0,
        _ => unreachable!(),
    };
    let steps = (horizon / dt).round() as usize;
    for k in 0..=steps {
        if clearance(&a, &b) <= 0.0 {
            return Some(k as f64 * dt);
        }
        a = oracle_step(a, ego.control.accel, ego.control.steer, theta, ego.params.wheelbase, dt);
        if let (OracleTarget::Vehicle(p), Some(s)) = (&target, b.as_mut()) {
            *s = oracle_step(*s, p.control.accel, p.control.steer, theta, p.params.wheelbase, dt);
        }
    }
    None
}

/// Quadratic-formula contact time of two constant-velocity discs.
pub fn constant_velocity_ttc(a: &VehicleState, b: &VehicleState, d: f64, horizon: f64) -> Option<f64> {
    let r = [a.x - b.x, a.y - b.y];
    let w = [a.v * a.psi.cos() - b.v * b.psi.cos(), a.v * a.psi.sin() - b.v * b.psi.sin()];
    let qa = w[0] * w[0] + w[1] * w[1];
    let qb = 2.0 * (r[0] * w[0] + r[1] * w[1]);
    let qc = r[0] * r[0] + r[1] * r[1] - d * d;
    if qc <= 0.0 {
        return Some(0.0);
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if qa == 0.0 || disc < 0.0 {
        return None;
    }
    let t = (-qb - disc.sqrt()) / (2.0 * qa);
    (t >= 0.0 && t <= horizon).then_some(t)
}

/// Textbook DBSCAN: connected components of core points, each border point
/// given to the component with the lowest-index core point among its core
/// neighbours. Returns cluster ids numbered by lowest member core index.
pub fn reference_dbscan(points: &[[f64; 2]], eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let near = |i: usize, j: usize| {
        let (dx, dy) = (points[i][0] - points[j][0], points[i][1] - points[j][1]);
        dx * dx + dy * dy <= eps * eps
    };
    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| near(i, j)).count() >= min_pts).collect();
    // Union-find over core points.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut c = i;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if core[i] && core[j] && near(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
    }
    // Roots are the smallest index of each component.
    let root: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let mut roots: Vec<usize> = (0..n).filter(|&i| core[i]).map(|i| root[i]).collect();
    roots.sort_unstable();
    roots.dedup();
    let id_of = |r: usize| roots.binary_search(&r).unwrap();
    (0..n)
        .map(|i| {
            if core[i] {
                Some(id_of(root[i]))
            } else {
                (0..n).filter(|&j| core[j] && near(i, j)).map(|j| root[j]).min().map(id_of)
            }
        })
        .collect()
}

/// Renumbers labels by first appearance so that two labelings agree exactly
/// when they describe the same partition.
pub fn canonical(labels: &[Option<usize>]) -> Vec<Option<usize>> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            l.map(|c| {
                let next = map.len();
                *map.entry(c).or_insert(next)
            })
        })
        .collect()
}

pub fn library_labels(labels: &[Label]) -> Vec<Option<usize>> {
    labels.iter().map(|l| l.cluster()).collect()
}

pub fn straight_network(length: f64) -> RoadNetwork {
    let lane = Lane::from_polyline("L", 3.5, &[[0.0, 0.0], [length, 0.0]], 1.0, 1.0).unwrap();
    RoadNetwork::new(GeoOrigin::default(), vec![lane], vec![], vec![]).unwrap()
}

pub struct PlatoonRun {
    /// Smallest bumper gap seen at any step.
    pub min_gap: f64,
    pub final_gaps: Vec<f64>,
    pub final_speeds: Vec<f64>,
}

/// Ten vehicles on one long lane starting at the equilibrium of
/// `v_start`; the leader's desired speed is then `v_leader`.
pub fn run_platoon(time_gap: f64, s0: f64, v_start: f64, v_leader: f64, duration: f64, dt: f64) -> PlatoonRun {
    let net = straight_network(4000.0);
    let base = NpcParams {
        time_gap,
        s0,
        v_des: v_start + 5.0,
        ..NpcParams::default()
    };
    let spacing = s0 + time_gap * v_start + base.length;
    let mut npcs: Vec<NpcVehicle> = (0..10)
        .map(|i| {
            let mut p = base;
            if i == 0 {
                p.v_des = v_leader;
            }
            NpcVehicle::new(format!("p{i:02}"), vec!["L".into()], 400.0 - i as f64 * spacing, v_start, p)
        })
        .collect();
    let gaps = |npcs: &[NpcVehicle]| -> Vec<f64> {
        let mut sorted: Vec<&NpcVehicle> = npcs.iter().collect();
        sorted.sort_by(|a, b| a.id.cmp(&b.id));
        sorted.windows(2).map(|w| w[0].s - w[1].s - base.length).collect()
    };
    let mut min_gap = f64::INFINITY;
    let steps = (duration / dt).round() as usize;
    for k in 0..steps {
        npcs = npc_step(&net, &npcs, &[], k as f64 * dt, dt).unwrap();
        assert_eq!(npcs.len(), 10, "a platoon vehicle left the lane");
        min_gap = gaps(&npcs).into_iter().fold(min_gap, f64::min);
    }
    let mut sorted = npcs.clone();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    PlatoonRun {
        min_gap,
        final_gaps: gaps(&npcs),
        final_speeds: sorted.iter().map(|n| n.v).collect(),
    }
}
