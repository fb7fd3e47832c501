use serde::{Deserialize, Serialize};

use crate::dynamics::{rk4_step, ControlInput, VehicleParams, VehicleState};
use crate::error::{Error, Result};
use crate::geom::{self, Point2};
use crate::roadnet::{ObstacleRegion, SlopeField};

pub const DEFAULT_HORIZON: f64 = 10.0;
pub const DEFAULT_TTC_DT: f64 = 0.01;
pub const ROOT_TOLERANCE: f64 = 1e-4;

/// Disc-model clearance between two vehicles.
pub fn margin_gv(p_i: Point2, p_j: Point2, l_i: f64, l_j: f64) -> f64 {
    geom::dist(p_i, p_j) - (l_i + l_j) / 2.0
}

/// Clearance between a vehicle disc and a convex region.
pub fn margin_gr(p: Point2, region: &ObstacleRegion, l: f64) -> f64 {
    geom::distance_to_convex_polygon(p, &region.polygon) - l / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TtcMethod {
    Traditional,
    HighFidelity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtcResult {
    pub method: TtcMethod,
    pub eval_time: f64,
    pub value: Option<f64>,
    pub horizon: f64,
    pub counterpart: String,
}

fn planar_velocity(s: &VehicleState) -> Point2 {
    [s.v * s.psi.cos(), s.v * s.psi.sin()]
}

/// Earliest `t` in `[0, horizon]` at which two constant-velocity discs touch.
pub fn traditional_ttc_value(z_i: &VehicleState, z_j: &VehicleState, l_i: f64, l_j: f64, horizon: f64) -> Option<f64> {
    let r = geom::sub(z_i.position(), z_j.position());
    let w = geom::sub(planar_velocity(z_i), planar_velocity(z_j));
    let d = (l_i + l_j) / 2.0;
    let c = geom::dot(r, r) - d * d;
    if c <= 0.0 {
        return Some(0.0);
    }
    let a = geom::dot(w, w);
    let b = 2.0 * geom::dot(r, w);
    if a == 0.0 || b >= 0.0 {
        return None;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    // Both roots are positive here; c / q is the smaller one and avoids
    // cancellation.
    let q = (-b + disc.sqrt()) / 2.0;
    let t = c / q;
    (t <= horizon).then_some(t)
}

pub fn traditional_ttc(
    z_i: &VehicleState,
    z_j: &VehicleState,
    l_i: f64,
    l_j: f64,
    horizon: f64,
    eval_time: f64,
    counterpart: &str,
) -> TtcResult {
    TtcResult {
        method: TtcMethod::Traditional,
        eval_time,
        value: traditional_ttc_value(z_i, z_j, l_i, l_j, horizon),
        horizon,
        counterpart: counterpart.to_string(),
    }
}

/// Constant-velocity time to reach a fixed region. The clearance along a
/// straight line is convex in time, so its minimum is located by golden
/// section and the first touch by bisection before it.
pub fn traditional_ttc_obstacle(z: &VehicleState, l: f64, region: &ObstacleRegion, horizon: f64) -> Option<f64> {
    let w = planar_velocity(z);
    let g = |t: f64| margin_gr([z.x + w[0] * t, z.y + w[1] * t], region, l);
    if g(0.0) <= 0.0 {
        return Some(0.0);
    }
    let (mut lo, mut hi) = (0.0, horizon);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-9 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if g(m1) <= g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let t_min = (lo + hi) / 2.0;
    if g(t_min) > 0.0 {
        return None;
    }
    let (mut a, mut b) = (0.0, t_min);
    while b - a > 1e-10 {
        let m = (a + b) / 2.0;
        if g(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Some(b)
}

/// A vehicle as seen by the TTC predictors: its state, the control held
/// over the prediction, and the model parameters (length, wheelbase, g).
#[derive(Debug, Clone, PartialEq)]
pub struct TtcParty {
    pub id: String,
    pub state: VehicleState,
    pub control: ControlInput,
    pub params: VehicleParams,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Counterpart {
    Vehicle(TtcParty),
    Obstacle(ObstacleRegion),
}

impl Counterpart {
    pub fn id(&self) -> &str {
        match self {
            Counterpart::Vehicle(p) => &p.id,
            Counterpart::Obstacle(o) => &o.id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HfConfig {
    pub dt: f64,
    pub horizon: f64,
    pub tolerance: f64,
}

impl Default for HfConfig {
    fn default() -> Self {
        HfConfig {
            dt: DEFAULT_TTC_DT,
            horizon: DEFAULT_HORIZON,
            tolerance: ROOT_TOLERANCE,
        }
    }
}

/// Ego state and, for a vehicle counterpart, the counterpart's state.
#[derive(Clone, Copy)]
struct Pair {
    ego: VehicleState,
    other: Option<VehicleState>,
}

/// Predicted contact time integrating both parties' single-track dynamics
/// under frozen controls. The first step whose clearance drops to zero is
/// refined by bisection on the step length.
pub fn high_fidelity_ttc_value(
    ego: &TtcParty,
    counterpart: &Counterpart,
    slope: &dyn SlopeField,
    cfg: &HfConfig,
) -> Result<Option<f64>> {
    if !(cfg.dt > 0.0 && cfg.horizon > 0.0 && cfg.tolerance > 0.0) {
        return Err(Error::Domain("TTC dt, horizon and tolerance must be > 0".into()));
    }
    let clearance = |p: &Pair| match (counterpart, &p.other) {
        (Counterpart::Vehicle(c), Some(o)) => margin_gv(p.ego.position(), o.position(), ego.params.length, c.params.length),
        (Counterpart::Obstacle(r), _) => margin_gr(p.ego.position(), r, ego.params.length),
        (Counterpart::Vehicle(_), None) => unreachable!("vehicle counterpart carries a state"),
    };
    let advance = |p: &Pair, h: f64| -> Result<Pair> {
        let other = match (counterpart, &p.other) {
            (Counterpart::Vehicle(c), Some(o)) => Some(rk4_step(o, &c.control, slope, &c.params, h)?),
            _ => None,
        };
        Ok(Pair {
            ego: rk4_step(&p.ego, &ego.control, slope, &ego.params, h)?,
            other,
        })
    };

    let mut pair = Pair {
        ego: ego.state,
        other: match counterpart {
            Counterpart::Vehicle(c) => Some(c.state),
            Counterpart::Obstacle(_) => None,
        },
    };
    if clearance(&pair) <= 0.0 {
        return Ok(Some(0.0));
    }
    let steps = (cfg.horizon / cfg.dt).ceil() as u64;
    for k in 0..steps {
        let t = k as f64 * cfg.dt;
        let h = cfg.dt.min(cfg.horizon - t);
        if h <= 0.0 {
            break;
        }
        let next = advance(&pair, h).map_err(|e| match e {
            Error::Integration(m) => Error::Integration(format!("TTC step {k}, {m}")),
            other => other,
        })?;
        if clearance(&next) <= 0.0 {
            let (mut lo, mut hi) = (0.0, h);
            while hi - lo > cfg.tolerance {
                let mid = (lo + hi) / 2.0;
                if clearance(&advance(&pair, mid)?) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(t + hi));
        }
        pair = next;
    }
    Ok(None)
}

pub fn high_fidelity_ttc(
    ego: &TtcParty,
    counterpart: &Counterpart,
    slope: &dyn SlopeField,
    cfg: &HfConfig,
    eval_time: f64,
) -> Result<TtcResult> {
    Ok(TtcResult {
        method: TtcMethod::HighFidelity,
        eval_time,
        value: high_fidelity_ttc_value(ego, counterpart, slope, cfg)?,
        horizon: cfg.horizon,
        counterpart: counterpart.id().to_string(),
    })
}

/// Traditional TTC against either kind of counterpart.
pub fn traditional_ttc_against(ego: &TtcParty, counterpart: &Counterpart, horizon: f64, eval_time: f64) -> TtcResult {
    let value = match counterpart {
        Counterpart::Vehicle(p) => traditional_ttc_value(&ego.state, &p.state, ego.params.length, p.params.length, horizon),
        Counterpart::Obstacle(r) => traditional_ttc_obstacle(&ego.state, ego.params.length, r, horizon),
    };
    TtcResult {
        method: TtcMethod::Traditional,
        eval_time,
        value,
        horizon,
        counterpart: counterpart.id().to_string(),
    }
}
