//! The synchronization engine: one integer-step clock, macro traffic steps,
//! micro ego-dynamics substeps with zero-order-hold controls, live
//! collision detection and trigger-time TTC evaluation.

mod batch;
mod engine;
mod setup;
mod trace;

pub use batch::{run_batch, threads_from_env, BatchJob, THREADS_ENV};
pub use engine::{
    collision_check, detect_trigger, junction_radius, npc_vehicle_params, path_leader, run, trigger_fires, Body,
    Contact, EgoRuntime, EgoStatus, World, PATH_LEADER_TOLERANCE,
};
pub use setup::{
    EgoController, EgoVehicle, Lateral, Longitudinal, Scenario, SimConfig, TimedCommand, TriggerSpec,
    DEFAULT_DECEL_THRESHOLD,
};
pub use trace::{
    parse_events_csv, parse_trace_csv, CollisionEvent, EventRow, StepRecord, TraceLog, TraceRow, TriggerEvent,
    VehicleRecord, Warning, EVENTS_CSV_HEADER, TRACE_CSV_HEADER,
};

#[cfg(test)]
mod tests;
