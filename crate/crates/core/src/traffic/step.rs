use crate::dynamics::cruise_control;
use crate::error::Result;
use crate::roadnet::RoadNetwork;

use super::npc::{NpcParams, NpcVehicle, RouteView};
use super::signals::{red_for, SignalPhase};

/// Look-ahead distance of leader search along the route.
pub const LEADER_HORIZON: f64 = 200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Leader {
    /// Bumper-to-bumper gap (m).
    pub gap: f64,
    pub v: f64,
    /// `None` for the virtual leader standing at a red signal.
    pub id: Option<String>,
}

/// Nearest vehicle ahead of `npcs[index]` along its route, or a virtual
/// stationary leader just past a red stop line, whichever is closer.
pub fn leader_lookup(
    network: &RoadNetwork,
    npcs: &[NpcVehicle],
    index: usize,
    signals: &[SignalPhase],
    t: f64,
) -> Result<Option<Leader>> {
    let me = &npcs[index];
    let view = RouteView::new(network, &me.route)?;
    let here = view.arc(me.lane_index, me.s);
    let half = me.params.length / 2.0;

    let mut best: Option<(f64, Leader)> = None;
    let mut offer = |arc: f64, other_half: f64, v: f64, id: Option<String>| {
        if best.as_ref().is_none_or(|(a, _)| arc < *a) {
            best = Some((
                arc,
                Leader {
                    gap: arc - half - other_half,
                    v,
                    id,
                },
            ));
        }
    };

    for (j, other) in npcs.iter().enumerate() {
        if j == index {
            continue;
        }
        let found = (me.lane_index..me.route.len()).find(|&k| {
            me.route[k] == other.lane() && (k > me.lane_index || other.s > me.s)
        });
        if let Some(k) = found {
            let arc = view.arc(k, other.s) - here;
            if arc > 0.0 && arc <= LEADER_HORIZON {
                offer(arc, other.params.length / 2.0, other.v, Some(other.id.clone()));
            }
        }
    }

    for k in me.lane_index..me.route.len().saturating_sub(1) {
        let lane = view.lanes[k];
        let stop = view.arc(k, lane.length()) - here;
        if stop > LEADER_HORIZON {
            break;
        }
        let Some(junction) = lane.end_junction.as_deref() else {
            continue;
        };
        if stop - half >= 0.0 && red_for(signals, junction, &lane.id, t) {
            offer(stop + me.params.s0 / 2.0, 0.0, 0.0, None);
            break;
        }
    }
    Ok(best.map(|(_, l)| l))
}

/// Following acceleration and whether the gap has already closed.
pub fn car_following_accel(leader: Option<(f64, f64)>, v: f64, params: &NpcParams) -> (f64, bool) {
    match leader {
        Some((gap, _)) if gap <= 0.0 => (-params.b_max, true),
        _ => (cruise_control(leader, v, &params.gains()), false),
    }
}

/// Distance covered over `dt` from speed `v` under constant `a`, stopping at
/// zero speed rather than reversing.
pub fn ballistic_distance(v: f64, a: f64, dt: f64) -> f64 {
    let v_new = v + a * dt;
    if v_new < 0.0 {
        if a < 0.0 {
            v * v / (2.0 * -a)
        } else {
            0.0
        }
    } else {
        ((v + v_new) / 2.0 * dt).max(0.0)
    }
}

/// Advance every NPC by one macro step. Leaders come from the incoming
/// snapshot, so the result does not depend on processing order. Vehicles
/// that run past the end of their route are dropped.
pub fn npc_step(
    network: &RoadNetwork,
    npcs: &[NpcVehicle],
    signals: &[SignalPhase],
    t: f64,
    dt: f64,
) -> Result<Vec<NpcVehicle>> {
    let mut order: Vec<usize> = (0..npcs.len()).collect();
    order.sort_by(|&a, &b| npcs[a].id.cmp(&npcs[b].id));

    let mut out = Vec::with_capacity(npcs.len());
    for i in order {
        let mut next = npcs[i].clone();
        if next.frozen {
            next.v = 0.0;
            next.accel = 0.0;
            out.push(next);
            continue;
        }
        let leader = leader_lookup(network, npcs, i, signals, t)?;
        let (a, _) = car_following_accel(leader.map(|l| (l.gap, l.v)), next.v, &next.params);
        let ds = ballistic_distance(next.v, a, dt);
        next.v = (next.v + a * dt).max(0.0);
        next.accel = a;
        next.s += ds;

        let view = RouteView::new(network, &next.route)?;
        while next.lane_index + 1 < next.route.len() && next.s > view.spans[next.lane_index] {
            next.s -= view.spans[next.lane_index];
            next.lane_index += 1;
        }
        if next.lane_index + 1 == next.route.len() && next.s > view.lanes[next.lane_index].length() {
            continue;
        }
        out.push(next);
    }
    Ok(out)
}
