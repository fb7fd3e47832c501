//! Vehicle-mounted GPS + inclinometer profiles and their fusion into lane
//! vertical geometry.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom;
use crate::roadnet::{Lane, RoadNetwork, DEFAULT_PROJECTION_TOLERANCE};

pub const SENSOR_CSV_HEADER: [&str; 6] = ["time", "lat", "lon", "pitch_rad", "roll_rad", "speed"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorRecord {
    pub time: f64,
    pub lat: f64,
    pub lon: f64,
    pub pitch: f64,
    pub roll: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorProfile {
    pub records: Vec<SensorRecord>,
    pub sample_rate: f64,
}

impl SensorProfile {
    pub fn new(records: Vec<SensorRecord>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0) {
            return Err(Error::Validation(format!("sample rate must be positive, got {sample_rate}")));
        }
        if let Some(i) = records.windows(2).position(|w| !(w[1].time > w[0].time)) {
            return Err(Error::Validation(format!(
                "sensor time not strictly increasing at record {}",
                i + 1
            )));
        }
        Ok(SensorProfile { records, sample_rate })
    }

    /// Reads the `time,lat,lon,pitch_rad,roll_rad,speed` CSV. The sample
    /// rate is inferred from the mean record spacing.
    pub fn from_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header != SENSOR_CSV_HEADER {
            return Err(Error::Validation(format!(
                "sensor CSV header must be `{}`, got `{}`",
                SENSOR_CSV_HEADER.join(","),
                header.join(",")
            )));
        }
        let mut records = Vec::new();
        for row in rdr.deserialize::<(f64, f64, f64, f64, f64, f64)>() {
            let (time, lat, lon, pitch, roll, speed) = row?;
            records.push(SensorRecord {
                time,
                lat,
                lon,
                pitch,
                roll,
                speed,
            });
        }
        let rate = match (records.first(), records.last()) {
            (Some(a), Some(b)) if records.len() > 1 && b.time > a.time => {
                (records.len() - 1) as f64 / (b.time - a.time)
            }
            _ => 5.0,
        };
        SensorProfile::new(records, rate)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(SENSOR_CSV_HEADER)?;
        for r in &self.records {
            w.write_record([r.time, r.lat, r.lon, r.pitch, r.roll, r.speed].map(|v| v.to_string()))?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf8"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    pub tolerance: f64,
    pub window: usize,
    pub min_coverage: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            tolerance: DEFAULT_PROJECTION_TOLERANCE,
            window: 5,
            min_coverage: 0.5,
        }
    }
}

/// Centered moving average whose window shrinks symmetrically near the ends,
/// so linear ramps pass through unchanged.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let half = window.max(1) / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let k = half.min(i).min(n - 1 - i);
            let slice = &values[i - k..=i + k];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

struct Observation {
    s: f64,
    slope: f64,
    roll: f64,
}

/// Replaces slope and superelevation of every lane the profile covers and
/// rebuilds elevation by integrating the grade. Planar geometry is never
/// touched.
pub fn fuse_sensor_profile(
    network: &RoadNetwork,
    profile: &SensorProfile,
    cfg: &FusionConfig,
) -> Result<RoadNetwork> {
    let n = profile.records.len();
    if n == 0 {
        return Err(Error::Fusion {
            coverage: 0.0,
            required: cfg.min_coverage,
        });
    }
    let pitch = moving_average(&profile.records.iter().map(|r| r.pitch).collect::<Vec<_>>(), cfg.window);
    let roll = moving_average(&profile.records.iter().map(|r| r.roll).collect::<Vec<_>>(), cfg.window);
    let xy: Vec<_> = profile
        .records
        .iter()
        .map(|r| network.origin.to_local(r.lat, r.lon))
        .collect();

    let mut observations: BTreeMap<String, Vec<Observation>> = BTreeMap::new();
    let mut covered = 0usize;
    for i in 0..n {
        let (loc, d) = match network.project_with_distance(xy[i]) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if d > cfg.tolerance {
            continue;
        }
        covered += 1;
        let lane = network.lane(&loc.lane).expect("projected lane exists");
        // Attitude is measured in the vehicle frame; flip it when the
        // vehicle drove against the lane direction.
        let sign = travel_sign(&xy, i, lane.pose_clamped(loc.s).heading);
        observations.entry(loc.lane).or_default().push(Observation {
            s: loc.s,
            slope: sign * pitch[i],
            roll: sign * roll[i],
        });
    }
    let coverage = covered as f64 / n as f64;
    if coverage < cfg.min_coverage {
        return Err(Error::Fusion {
            coverage,
            required: cfg.min_coverage,
        });
    }

    let mut out = network.clone();
    for lane in &mut out.lanes {
        if let Some(obs) = observations.get_mut(&lane.id) {
            obs.sort_by(|a, b| a.s.total_cmp(&b.s));
            apply_observations(lane, obs);
        }
    }
    anchor_elevation(&mut out, &observations.keys().cloned().collect());
    Ok(out)
}

fn travel_sign(xy: &[[f64; 2]], i: usize, lane_heading: f64) -> f64 {
    let (a, b) = if i + 1 < xy.len() {
        (xy[i], xy[i + 1])
    } else if i > 0 {
        (xy[i - 1], xy[i])
    } else {
        return 1.0;
    };
    let d = geom::sub(b, a);
    if geom::norm(d) < 1e-6 {
        return 1.0;
    }
    if geom::dot(d, [lane_heading.cos(), lane_heading.sin()]) < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn apply_observations(lane: &mut Lane, obs: &[Observation]) {
    // Merge observations sharing an arc length.
    let mut s = Vec::<f64>::new();
    let mut slope = Vec::<f64>::new();
    let mut roll = Vec::<f64>::new();
    let mut count = Vec::<f64>::new();
    for o in obs {
        if s.last() == Some(&o.s) {
            let k = s.len() - 1;
            slope[k] += o.slope;
            roll[k] += o.roll;
            count[k] += 1.0;
        } else {
            s.push(o.s);
            slope.push(o.slope);
            roll.push(o.roll);
            count.push(1.0);
        }
    }
    for k in 0..s.len() {
        slope[k] /= count[k];
        roll[k] /= count[k];
    }
    for c in &mut lane.samples {
        c.slope = crate::roadnet::query_interp(&s, &slope, c.s);
        c.superelevation = crate::roadnet::query_interp(&s, &roll, c.s);
    }
    integrate_elevation(lane, 0.0);
}

/// z(s) = z(start) + trapezoidal integral of tan(slope).
fn integrate_elevation(lane: &mut Lane, z0: f64) {
    let mut z = z0;
    let mut prev: Option<(f64, f64)> = None;
    for c in &mut lane.samples {
        let g = c.slope.tan();
        if let Some((ps, pg)) = prev {
            z += 0.5 * (pg + g) * (c.s - ps);
        }
        c.z = z;
        prev = Some((c.s, g));
    }
}

/// Chains elevation across connected fused lanes so that each connected
/// component starts from z = 0 at its first lane (in id order).
fn anchor_elevation(net: &mut RoadNetwork, fused: &BTreeSet<String>) {
    let index: BTreeMap<String, usize> = net.lanes.iter().enumerate().map(|(i, l)| (l.id.clone(), i)).collect();
    let mut neighbours: BTreeMap<&str, Vec<(&str, bool)>> = BTreeMap::new();
    for lane in net.lanes.iter().filter(|l| fused.contains(&l.id)) {
        for succ in lane.successors.iter().filter(|s| fused.contains(*s)) {
            neighbours.entry(&lane.id).or_default().push((succ, true));
            neighbours.entry(succ).or_default().push((&lane.id, false));
        }
    }
    let neighbours: BTreeMap<String, Vec<(String, bool)>> = neighbours
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.into_iter().map(|(a, b)| (a.to_string(), b)).collect()))
        .collect();

    let mut seen = BTreeSet::new();
    for root in fused {
        if !seen.insert(root.clone()) {
            continue;
        }
        let mut queue = VecDeque::from([root.clone()]);
        while let Some(id) = queue.pop_front() {
            let (start_z, end_z) = {
                let l = &net.lanes[index[&id]];
                (l.first().z, l.last().z)
            };
            for (next, forward) in neighbours.get(&id).into_iter().flatten() {
                if !seen.insert(next.clone()) {
                    continue;
                }
                let lane = &mut net.lanes[index[next]];
                if *forward {
                    integrate_elevation(lane, end_z);
                } else {
                    let rise = lane.last().z - lane.first().z;
                    integrate_elevation(lane, start_z - rise);
                }
                queue.push_back(next.clone());
            }
        }
    }
}
