//! Vehicle motion: tire and engine force model, pedal mapping, the
//! slope-aware single-track model with RK4 integration, and the
//! longitudinal and lateral controllers.

mod bicycle;
mod control;
mod curve;
mod engine;
mod tire;
mod vehicle;

pub use bicycle::{bicycle_derivative, rk4_generic, rk4_step};
pub use control::{
    cruise_control, longitudinal_feedback_control, project_on_path, pure_pursuit_steering, FeedbackGains,
    PursuitCommand,
};
pub use curve::Curve;
pub use engine::{engine_torque, EngineConfig, EngineTorque};
pub use tire::{combined_slip, slip_smoothing, tire_longitudinal_force, TireConfig};
pub use vehicle::{pedal_to_accel, ControlInput, PedalResponse, VehicleParams, VehicleState};
