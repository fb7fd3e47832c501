use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::safety::{ScenarioMetrics, TtcResult};

pub const TRACE_CSV_HEADER: &str = "time,vehicle_id,x,y,z,psi,v,a_cmd,steer";
pub const EVENTS_CSV_HEADER: &str = "time,kind,participants,impact_speed,x,y,z";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleRecord {
    pub vehicle_id: String,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub psi: f64,
    pub v: f64,
    pub a_cmd: f64,
    pub steer: f64,
}

/// States at the start of a macro step and the controls applied over it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub time: f64,
    pub vehicles: Vec<VehicleRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub time: f64,
    pub participants: (String, String),
    pub impact_speed: f64,
    pub location: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerEvent {
    pub time: f64,
    pub step: u64,
    pub ego: String,
    pub counterpart: Option<String>,
    pub location: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub time: f64,
    pub vehicle: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceLog {
    pub scenario: String,
    pub macro_dt: f64,
    pub steps: Vec<StepRecord>,
    pub collisions: Vec<CollisionEvent>,
    pub trigger: Option<TriggerEvent>,
    pub ttc: Vec<TtcResult>,
    pub metrics: Option<ScenarioMetrics>,
    pub warnings: Vec<Warning>,
}

impl TraceLog {
    /// Contact time between the trigger ego and its counterpart, if any.
    pub fn contact_time(&self, ego: &str, counterpart: &str) -> Option<f64> {
        self.collisions
            .iter()
            .find(|c| {
                let (a, b) = (&c.participants.0, &c.participants.1);
                (a == ego && b == counterpart) || (a == counterpart && b == ego)
            })
            .map(|c| c.time)
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        for step in &self.steps {
            for r in &step.vehicles {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    step.time, r.vehicle_id, r.x, r.y, r.z, r.psi, r.v, r.a_cmd, r.steer
                );
            }
        }
        out
    }

    /// Collision, trigger and warning rows in time order (stable within a
    /// time stamp: triggers, then collisions, then warnings).
    pub fn events_csv(&self) -> String {
        let mut rows: Vec<(f64, u8, String)> = Vec::new();
        if let Some(t) = &self.trigger {
            let participants = match &t.counterpart {
                Some(c) => format!("{};{}", t.ego, c),
                None => t.ego.clone(),
            };
            rows.push((
                t.time,
                0,
                format!("{},trigger,{},,{},{},{}", t.time, participants, t.location[0], t.location[1], t.location[2]),
            ));
        }
        for c in &self.collisions {
            rows.push((
                c.time,
                1,
                format!(
                    "{},collision,{};{},{},{},{},{}",
                    c.time, c.participants.0, c.participants.1, c.impact_speed, c.location[0], c.location[1], c.location[2]
                ),
            ));
        }
        for w in &self.warnings {
            rows.push((w.time, 2, format!("{},warning,{},,,,", w.time, w.vehicle)));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut out = String::from(EVENTS_CSV_HEADER);
        out.push('\n');
        for (_, _, r) in rows {
            out.push_str(&r);
            out.push('\n');
        }
        out
    }
}

/// A trace row read back from CSV.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TraceRow {
    pub time: f64,
    pub vehicle_id: String,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub psi: f64,
    pub v: f64,
    pub a_cmd: f64,
    pub steer: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct EventRow {
    pub time: f64,
    pub kind: String,
    pub participants: String,
    pub impact_speed: Option<f64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub z: Option<f64>,
}

fn read_rows<T: for<'de> Deserialize<'de>>(text: &str, header: &str) -> Result<Vec<T>> {
    let first = text.lines().next().unwrap_or("");
    if first.trim_end() != header {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{header}`, found `{first}`"),
        });
    }
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>> {
    read_rows(text, TRACE_CSV_HEADER)
}

pub fn parse_events_csv(text: &str) -> Result<Vec<EventRow>> {
    read_rows(text, EVENTS_CSV_HEADER)
}
