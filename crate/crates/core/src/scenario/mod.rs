//! Scenario documents, the reference presets, offline trace analysis and
//! the TTC comparison report.

mod presets;
mod report;
mod road;
mod spec;

use std::collections::BTreeMap;
use std::fmt::Write as _;

pub use presets::{preset, BASE_MASS, DOWNHILL_GRADE, EGO_ID, LIGHT_MASS, LOW_FRICTION, NPC_ID, PRESET_IDS};
pub use report::{parse_report_csv, report, Report, ReportRow, REPORT_CSV_HEADER};
pub use road::{cross_road, route_path, straight_road, CrossRoad, StraightRoad, CROSS_INNER, CROSS_JUNCTION};
pub use spec::{
    load_scenario, EgoSpec, NpcPlacement, NpcSection, PathSpec, RoadSpec, ScenarioSpec, StartSpec,
    DEFAULT_SCENARIO_HORIZON,
};

use crate::cosim::{npc_vehicle_params, trigger_fires, EventRow, TraceRow, VehicleRecord};
use crate::dynamics::{ControlInput, VehicleParams, VehicleState};
use crate::error::{Error, Result};
use crate::roadnet::RoadNetwork;
use crate::safety::{ttc_at_trigger, Counterpart, HfConfig, ScenarioMetrics, TtcParty};
use crate::traffic::NpcParams;

pub const METRICS_CSV_HEADER: &str = "scenario,traditional,simulated,high_fidelity";

pub fn metrics_csv(metrics: &[ScenarioMetrics]) -> String {
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x}"));
    let mut out = String::from(METRICS_CSV_HEADER);
    out.push('\n');
    for m in metrics {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            m.scenario,
            opt(m.traditional),
            opt(m.simulated),
            opt(m.high_fidelity)
        );
    }
    out
}

fn vehicle_params(spec: &ScenarioSpec, id: &str) -> VehicleParams {
    if let Some(e) = spec.egos.iter().find(|e| e.id == id) {
        return e.params.clone();
    }
    if let Some(n) = spec.npcs.placements.iter().find(|n| n.id == id) {
        return npc_vehicle_params(&n.params);
    }
    let spawned = spec
        .npcs
        .demand
        .entries
        .first()
        .map_or_else(NpcParams::default, |d| d.params);
    npc_vehicle_params(&spawned)
}

fn party(row: &TraceRow, params: VehicleParams) -> TtcParty {
    TtcParty {
        id: row.vehicle_id.clone(),
        state: VehicleState {
            x: row.x,
            y: row.y,
            z: row.z,
            psi: row.psi,
            v: row.v,
        },
        control: ControlInput::new(row.a_cmd, row.steer),
        params,
    }
}

/// Recomputes the TTC comparison of a recorded run: finds the trigger in
/// the trace, evaluates both TTC estimates on the recorded states and
/// controls, and takes the contact time from the events.
pub fn analyze_trace(
    spec: &ScenarioSpec,
    network: &RoadNetwork,
    trace: &[TraceRow],
    events: &[EventRow],
    ttc: &HfConfig,
) -> Result<ScenarioMetrics> {
    let trigger = spec
        .trigger
        .as_ref()
        .ok_or_else(|| Error::Config(format!("scenario `{}` has no trigger", spec.id)))?;
    let cp = spec
        .counterpart
        .as_deref()
        .ok_or_else(|| Error::Config(format!("scenario `{}` has no counterpart", spec.id)))?;
    let ego_id = spec.egos[0].id.as_str();

    let mut by_time: BTreeMap<u64, Vec<&TraceRow>> = BTreeMap::new();
    for r in trace {
        by_time.entry(r.time.to_bits()).or_default().push(r);
    }
    let mut times: Vec<f64> = by_time.keys().map(|b| f64::from_bits(*b)).collect();
    times.sort_by(f64::total_cmp);

    let empty = ScenarioMetrics {
        scenario: spec.id.clone(),
        traditional: None,
        simulated: None,
        high_fidelity: None,
    };
    for t in times {
        let rows = &by_time[&t.to_bits()];
        let Some(ego) = rows.iter().find(|r| r.vehicle_id == ego_id) else {
            continue;
        };
        let record = VehicleRecord {
            vehicle_id: ego.vehicle_id.clone(),
            x: ego.x,
            y: ego.y,
            z: ego.z,
            psi: ego.psi,
            v: ego.v,
            a_cmd: ego.a_cmd,
            steer: ego.steer,
        };
        if !trigger_fires(trigger, &record, network)? {
            continue;
        }
        let counterpart = if let Some(r) = rows.iter().find(|r| r.vehicle_id == cp) {
            Counterpart::Vehicle(party(r, vehicle_params(spec, cp)))
        } else if let Some(o) = network.obstacle(cp) {
            Counterpart::Obstacle(o.clone())
        } else {
            return Err(Error::Config(format!("counterpart `{cp}` is not in the trace at t={t}")));
        };
        let contact = events
            .iter()
            .find(|e| {
                e.kind == "collision" && {
                    let mut p = e.participants.split(';');
                    let (a, b) = (p.next().unwrap_or(""), p.next().unwrap_or(""));
                    (a == ego_id && b == cp) || (a == cp && b == ego_id)
                }
            })
            .map(|e| e.time);
        let ego_party = party(ego, spec.egos[0].params.clone());
        return ttc_at_trigger(&spec.id, &ego_party, &counterpart, network, ttc, t, contact);
    }
    Ok(empty)
}
