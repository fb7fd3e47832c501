use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::npc::{validate_route, NpcParams, NpcVehicle};
use crate::error::{Error, Result};
use crate::roadnet::RoadNetwork;

/// Initial speed cap for spawned vehicles when the entry gives none (m/s).
pub const DEFAULT_LANE_SPEED: f64 = 13.89;

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandEntry {
    pub depart: f64,
    pub route: Vec<String>,
    #[serde(default = "one")]
    pub count: usize,
    #[serde(default)]
    pub headway: f64,
    #[serde(default)]
    pub params: NpcParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depart_speed: Option<f64>,
    /// Half-width of a uniform random perturbation added to each headway.
    #[serde(default)]
    pub headway_jitter: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DemandSpec {
    pub entries: Vec<DemandEntry>,
}

impl DemandSpec {
    pub fn validate(&self, network: &RoadNetwork) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            if !(e.depart >= 0.0) || !(e.headway >= 0.0) || !(e.headway_jitter >= 0.0) {
                return Err(Error::Validation(format!(
                    "demand entry {i}: depart, headway and headway_jitter must be >= 0"
                )));
            }
            e.params.validate()?;
            validate_route(network, &e.route).map_err(|err| Error::Config(format!("demand entry {i}: {err}")))?;
        }
        Ok(())
    }
}

/// Releases demand vehicles when they are due and the origin has room,
/// holding them back (in order) otherwise.
#[derive(Debug, Clone)]
pub struct Spawner {
    queues: Vec<(usize, Vec<f64>)>,
    next_id: usize,
}

impl Spawner {
    pub fn new(demand: &DemandSpec, seed: u64) -> Self {
        let queues = demand
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
                let mut times = Vec::with_capacity(e.count);
                let mut t = e.depart;
                for k in 0..e.count {
                    if k > 0 {
                        let jitter = if e.headway_jitter > 0.0 {
                            rng.gen_range(-e.headway_jitter..=e.headway_jitter)
                        } else {
                            0.0
                        };
                        t += (e.headway + jitter).max(0.0);
                    }
                    times.push(t);
                }
                (0, times)
            })
            .collect();
        Spawner { queues, next_id: 0 }
    }

    pub fn pending(&self) -> usize {
        self.queues.iter().map(|(n, ts)| ts.len() - n).sum()
    }

    pub fn spawn(
        &mut self,
        demand: &DemandSpec,
        t: f64,
        network: &RoadNetwork,
        active: &[NpcVehicle],
    ) -> Result<Vec<NpcVehicle>> {
        let mut spawned: Vec<NpcVehicle> = Vec::new();
        for (entry, (next, times)) in demand.entries.iter().zip(self.queues.iter_mut()) {
            if *next >= times.len() || times[*next] > t + 1e-9 {
                continue;
            }
            let origin = &entry.route[0];
            if network.lane(origin).is_none() {
                return Err(Error::Config(format!("demand route references unknown lane `{origin}`")));
            }
            let need = entry.params.s0 + entry.params.length;
            let blocked = active
                .iter()
                .chain(spawned.iter())
                .filter(|n| n.lane_index < n.route.len() && n.lane() == origin)
                .any(|n| n.s - n.params.length / 2.0 < need);
            if blocked {
                continue;
            }
            let v = entry.params.v_des.min(entry.depart_speed.unwrap_or(DEFAULT_LANE_SPEED));
            spawned.push(NpcVehicle::new(
                format!("npc{:04}", self.next_id),
                entry.route.clone(),
                0.0,
                v,
                entry.params,
            ));
            self.next_id += 1;
            *next += 1;
        }
        Ok(spawned)
    }
}
