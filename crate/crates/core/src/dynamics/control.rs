use serde::{Deserialize, Serialize};

use super::vehicle::VehicleState;
use crate::geom::{project_on_segment, wrap_angle, Point2};

/// Gains and spacing policy of the constant-time-gap feedback law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeedbackGains {
    pub k_s: f64,
    pub k_v: f64,
    /// Free-flow speed tracking gain.
    pub k_f: f64,
    pub s0: f64,
    pub time_gap: f64,
    pub v_des: f64,
    pub a_max: f64,
    pub b_max: f64,
}

impl Default for FeedbackGains {
    fn default() -> Self {
        FeedbackGains {
            k_s: 0.5,
            k_v: 1.0,
            k_f: 0.5,
            s0: 2.5,
            time_gap: 1.0,
            v_des: 13.89,
            a_max: 2.5,
            b_max: 4.5,
        }
    }
}

/// `k_s (gap - s0 - T v) + k_v (v_lead - v)` with a leader, `k_f (v_des - v)`
/// without one, clamped to `[-b_max, a_max]`.
pub fn longitudinal_feedback_control(leader: Option<(f64, f64)>, v: f64, g: &FeedbackGains) -> f64 {
    let raw = match leader {
        Some((gap, v_lead)) => g.k_s * (gap - g.s0 - g.time_gap * v) + g.k_v * (v_lead - v),
        None => g.k_f * (g.v_des - v),
    };
    raw.clamp(-g.b_max, g.a_max)
}

/// Follow the leader without exceeding the free-flow command, so a distant
/// leader never pushes the vehicle above its desired speed.
pub fn cruise_control(leader: Option<(f64, f64)>, v: f64, g: &FeedbackGains) -> f64 {
    let free = longitudinal_feedback_control(None, v, g);
    match leader {
        Some(_) => longitudinal_feedback_control(leader, v, g).min(free),
        None => free,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PursuitCommand {
    Steer(f64),
    /// The vehicle has passed the end of its path.
    PathExhausted,
}

/// Closest point of a polyline: `(arc length, segment index, distance)`.
pub fn project_on_path(path: &[Point2], p: Point2) -> (f64, usize, f64) {
    if path.len() == 1 {
        return (0.0, 0, crate::geom::dist(p, path[0]));
    }
    let mut best = (0.0, 0, f64::INFINITY);
    let mut arc = 0.0;
    for i in 0..path.len() - 1 {
        let seg = crate::geom::dist(path[i], path[i + 1]);
        let (t, d) = project_on_segment(p, path[i], path[i + 1]);
        if d < best.2 - 1e-12 {
            best = (arc + t * seg, i, d);
        }
        arc += seg;
    }
    best
}

pub fn pure_pursuit_steering(
    state: &VehicleState,
    path: &[Point2],
    lookahead: f64,
    wheelbase: f64,
    delta_max: f64,
) -> PursuitCommand {
    if path.is_empty() || !(lookahead > 0.0) {
        return PursuitCommand::PathExhausted;
    }
    let p = state.position();
    let total: f64 = path.windows(2).map(|w| crate::geom::dist(w[0], w[1])).sum();
    let (s_proj, seg, _) = project_on_path(path, p);
    if path.len() < 2 {
        return PursuitCommand::PathExhausted;
    }
    let last = path.len() - 1;
    if seg == last - 1 {
        let (t, _) = project_on_segment(p, path[last - 1], path[last]);
        let along = crate::geom::dot(crate::geom::sub(p, path[last]), crate::geom::sub(path[last], path[last - 1]));
        if t >= 1.0 && along >= 0.0 && s_proj >= total - 1e-9 {
            return PursuitCommand::PathExhausted;
        }
    }

    let mut arc = 0.0;
    let mut target = path[last];
    for i in 0..path.len() {
        if i > 0 {
            arc += crate::geom::dist(path[i - 1], path[i]);
        }
        if arc >= s_proj + lookahead {
            target = path[i];
            break;
        }
    }
    let bearing = (target[1] - p[1]).atan2(target[0] - p[0]);
    let alpha = wrap_angle(bearing - state.psi);
    let delta = (2.0 * wheelbase * alpha.sin() / lookahead).atan();
    PursuitCommand::Steer(delta.clamp(-delta_max, delta_max))
}
