//! Background traffic: demand-driven spawning, route following over the
//! lane graph and constant-time-gap car following.

mod demand;
mod npc;
mod signals;
mod step;

pub use demand::{DemandEntry, DemandSpec, Spawner, DEFAULT_LANE_SPEED};
pub use npc::{lanes_chained, npc_kinematics, validate_route, NpcParams, NpcVehicle, RouteView, RoutePose};
pub use signals::{red_for, PhaseStep, SignalPhase};
pub use step::{ballistic_distance, car_following_accel, leader_lookup, npc_step, Leader, LEADER_HORIZON};
