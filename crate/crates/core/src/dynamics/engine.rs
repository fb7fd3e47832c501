use serde::{Deserialize, Serialize};

use super::curve::Curve;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineConfig {
    /// Peak torque (N m).
    pub t_peak: f64,
    /// Maximum engine speed (rad/s).
    pub omega_max: f64,
    /// Torque fraction over normalized engine speed in [0, 1].
    pub torque_curve: Curve,
    /// Wheel-to-engine speed multiplier of the single fixed gear.
    pub gear_ratio: f64,
    pub wheel_radius: f64,
    /// Shift points are accepted for file compatibility but unused: the
    /// drivetrain stays in one gear.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub up_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub down_ratio: Option<f64>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            t_peak: 400.0,
            omega_max: 6000.0 * 2.0 * std::f64::consts::PI / 60.0,
            torque_curve: Curve::new(vec![[0.0, 0.8], [0.5, 1.0], [1.0, 0.6]]).expect("valid"),
            gear_ratio: 6.0,
            wheel_radius: 0.33,
            up_ratio: None,
            down_ratio: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineTorque {
    pub torque: f64,
    /// Engine speed exceeded `omega_max` and was clamped.
    pub clamped: bool,
}

pub fn engine_torque(u_torque: f64, omega_engine: f64, cfg: &EngineConfig) -> EngineTorque {
    let u = u_torque.clamp(0.0, 1.0);
    let clamped = omega_engine > cfg.omega_max;
    let omega = omega_engine.clamp(0.0, cfg.omega_max);
    EngineTorque {
        torque: u * cfg.t_peak * cfg.torque_curve.eval(omega / cfg.omega_max),
        clamped,
    }
}
