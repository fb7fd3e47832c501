use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::roadnet::RoadNetwork;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Topology problems: dangling references and single-link junctions are
/// errors; dead ends and junctions without turning paths are warnings.
pub fn validate_topology(network: &RoadNetwork) -> ValidationReport {
    let mut report = ValidationReport::default();
    let lanes: BTreeSet<&str> = network.lanes.iter().map(|l| l.id.as_str()).collect();
    let junctions: BTreeSet<&str> = network.junctions.iter().map(|j| j.id.as_str()).collect();

    for lane in &network.lanes {
        for (kind, refs) in [("predecessor", &lane.predecessors), ("successor", &lane.successors)] {
            for r in refs.iter().filter(|r| !lanes.contains(r.as_str())) {
                report
                    .errors
                    .push(format!("lane `{}` has dangling {kind} `{r}`", lane.id));
            }
        }
        for j in lane
            .start_junction
            .iter()
            .chain(&lane.end_junction)
            .filter(|j| !junctions.contains(j.as_str()))
        {
            report
                .errors
                .push(format!("lane `{}` references missing junction `{j}`", lane.id));
        }
        if lane.predecessors.is_empty() && lane.start_junction.is_none() {
            report
                .warnings
                .push(format!("lane `{}` has a dead end at its start", lane.id));
        }
        if lane.successors.is_empty() && lane.end_junction.is_none() {
            report
                .warnings
                .push(format!("lane `{}` has a dead end at its end", lane.id));
        }
    }

    for j in &network.junctions {
        for link in j.endpoint_links.iter().filter(|l| !lanes.contains(l.lane.as_str())) {
            report
                .errors
                .push(format!("junction `{}` references missing lane `{}`", j.id, link.lane));
        }
        for c in &j.connections {
            for l in [&c.from, &c.to] {
                if !lanes.contains(l.as_str()) {
                    report
                        .errors
                        .push(format!("junction `{}` connection uses missing lane `{l}`", j.id));
                }
            }
        }
        if j.endpoint_links.len() < 2 {
            report
                .errors
                .push(format!("junction `{}` has only {} endpoint link(s)", j.id, j.endpoint_links.len()));
        }
        if j.connections.is_empty() {
            report
                .warnings
                .push(format!("junction `{}` has no turning connections", j.id));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::{GeoOrigin, Lane};

    #[test]
    fn isolated_lane_warns_per_free_end() {
        let lane = Lane::from_polyline("a", 3.5, &[[0.0, 0.0], [10.0, 0.0]], 1.0, 1.0).unwrap();
        let net = RoadNetwork::new(GeoOrigin::default(), vec![lane], vec![], vec![]).unwrap();
        let r = validate_topology(&net);
        assert!(r.errors.is_empty());
        assert_eq!(r.warnings.len(), 2);
    }
}
