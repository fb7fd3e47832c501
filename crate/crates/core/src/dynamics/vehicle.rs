use serde::{Deserialize, Serialize};

use super::engine::{engine_torque, EngineConfig};
use super::tire::{tire_longitudinal_force, TireConfig};
use crate::error::{Error, Result};

/// Kinematic state: position, heading and longitudinal speed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub z: f64,
    pub psi: f64,
    pub v: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, z: f64, psi: f64, v: f64) -> Self {
        VehicleState { x, y, z, psi, v }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.x, self.y, self.z, self.psi, self.v]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        VehicleState { x: a[0], y: a[1], z: a[2], psi: a[3], v: a[4] }
    }

    pub fn position(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::Validation("vehicle state has non-finite fields".into()));
        }
        if self.v < 0.0 {
            return Err(Error::Validation(format!("vehicle speed {} must be >= 0", self.v)));
        }
        Ok(())
    }
}

/// Net longitudinal acceleration command and steering angle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlInput {
    pub accel: f64,
    pub steer: f64,
}

impl ControlInput {
    pub fn new(accel: f64, steer: f64) -> Self {
        ControlInput { accel, steer }
    }
}

fn default_g() -> f64 {
    9.81
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VehicleParams {
    pub mass: f64,
    pub wheelbase: f64,
    pub length: f64,
    pub width: f64,
    pub tire: TireConfig,
    pub engine: EngineConfig,
    pub brake_force_max: f64,
    pub a_max: f64,
    pub b_max: f64,
    pub delta_max: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    /// Rotational inertia and damping are carried for configuration
    /// compatibility; the single-track model does not use them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping_rate: Option<f64>,
}

impl Default for VehicleParams {
    fn default() -> Self {
        VehicleParams {
            mass: 1630.0,
            wheelbase: 2.7,
            length: 4.7,
            width: 1.85,
            tire: TireConfig::default(),
            engine: EngineConfig::default(),
            brake_force_max: 14000.0,
            a_max: 3.0,
            b_max: 10.0,
            delta_max: 0.6,
            g: 9.81,
            moi: None,
            damping_rate: None,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Validation(m));
        if !(self.mass > 0.0) {
            return fail(format!("mass {} must be > 0", self.mass));
        }
        if !(self.wheelbase > 0.0) {
            return fail(format!("wheelbase {} must be > 0", self.wheelbase));
        }
        if !(self.length >= self.wheelbase) {
            return fail(format!("length {} must be >= wheelbase {}", self.length, self.wheelbase));
        }
        if !(self.a_max >= 0.0 && self.b_max >= 0.0 && self.brake_force_max >= 0.0) {
            return fail("a_max, b_max and brake_force_max must be >= 0".into());
        }
        if !(self.delta_max > 0.0 && self.delta_max < std::f64::consts::FRAC_PI_2) {
            return fail(format!("delta_max {} must lie in (0, pi/2)", self.delta_max));
        }
        let e = &self.engine;
        if !(e.t_peak > 0.0 && e.omega_max > 0.0 && e.gear_ratio > 0.0 && e.wheel_radius > 0.0) {
            return fail("engine t_peak, omega_max, gear_ratio and wheel_radius must be > 0".into());
        }
        if e.torque_curve.points().iter().any(|p| !(p[1] > 0.0 && p[1] <= 1.0)) {
            return fail("engine torque curve values must lie in (0, 1]".into());
        }
        Ok(())
    }

    /// Clamp a control pair to the actuator limits.
    pub fn clamp_control(&self, u: ControlInput) -> ControlInput {
        ControlInput {
            accel: u.accel.clamp(-self.b_max, self.a_max),
            steer: u.steer.clamp(-self.delta_max, self.delta_max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PedalResponse {
    pub accel: f64,
    /// The engine speed implied by the wheel speed exceeded its maximum.
    pub omega_clamped: bool,
}

/// Map throttle and brake pedals to a net acceleration (gravity excluded).
/// Brake wins when both pedals are pressed.
pub fn pedal_to_accel(
    throttle: f64,
    brake: f64,
    steer: f64,
    state: &VehicleState,
    params: &VehicleParams,
    mu: f64,
    theta: f64,
) -> Result<PedalResponse> {
    let brake = brake.clamp(0.0, 1.0);
    let throttle = if brake > 0.0 { 0.0 } else { throttle.clamp(0.0, 1.0) };
    let w_load = params.mass * params.g * theta.cos();
    let available = mu * w_load;

    let e = &params.engine;
    let omega = e.gear_ratio * state.v.max(0.0) / e.wheel_radius;
    let torque = engine_torque(throttle, omega, e);
    let f_request = torque.torque * e.gear_ratio / e.wheel_radius;
    let f_drive = if f_request > 0.0 {
        if available > 0.0 {
            let s_long = params.tire.peak_slip() * f_request / available;
            let f_tire = tire_longitudinal_force(s_long, steer, mu, w_load, &params.tire)?;
            f_request.min(f_tire)
        } else {
            0.0
        }
    } else {
        0.0
    };
    let f_brake = (brake * params.brake_force_max).min(available.max(0.0));
    Ok(PedalResponse {
        accel: (f_drive - f_brake) / params.mass,
        omega_clamped: torque.clamped,
    })
}
