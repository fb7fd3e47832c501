use std::collections::BTreeMap;

use super::dbscan::{dbscan, Label};
use crate::geom::{self, wrap_angle, Point2};
use crate::roadnet::{Connection, EndpointLink, Junction, LaneEnd, RoadNetwork};

pub const DEFAULT_JUNCTION_EPS: f64 = 5.0;
pub const DEFAULT_JUNCTION_MIN_PTS: usize = 2;
/// Largest heading change allowed for a turning connection (rad).
pub const MAX_TURN: f64 = 150.0 * std::f64::consts::PI / 180.0;

struct Endpoint {
    lane: String,
    end: LaneEnd,
    pos: [f64; 3],
    heading: f64,
}

impl Endpoint {
    fn xy(&self) -> Point2 {
        [self.pos[0], self.pos[1]]
    }

    /// Incoming lane ends should point at the junction, outgoing starts away.
    fn aligned_with(&self, centroid: Point2) -> bool {
        let to_center = geom::sub(centroid, self.xy());
        if geom::norm(to_center) < 1e-9 {
            return true;
        }
        let dir = [self.heading.cos(), self.heading.sin()];
        let d = geom::dot(dir, to_center);
        match self.end {
            LaneEnd::End => d >= 0.0,
            LaneEnd::Start => d <= 0.0,
        }
    }
}

/// Clusters lane endpoints into junctions and rebuilds every junction-derived
/// reference (junction list, lane start/end junctions, successors and
/// predecessors). Existing junction data is discarded first.
pub fn infer_junctions(network: &RoadNetwork, eps: f64, min_pts: usize) -> RoadNetwork {
    let mut lanes = network.lanes.clone();
    lanes.sort_by(|a, b| a.id.cmp(&b.id));
    let mut endpoints = Vec::with_capacity(lanes.len() * 2);
    for lane in &lanes {
        for (end, c) in [(LaneEnd::Start, lane.first()), (LaneEnd::End, lane.last())] {
            endpoints.push(Endpoint {
                lane: lane.id.clone(),
                end,
                pos: [c.x, c.y, c.z],
                heading: c.heading,
            });
        }
    }
    let pts: Vec<Point2> = endpoints.iter().map(Endpoint::xy).collect();
    let labels = dbscan(&pts, eps, min_pts);

    let mut members = labels.members();
    let centroids: Vec<[f64; 3]> = members
        .iter()
        .map(|m| {
            let n = m.len() as f64;
            let mut c = [0.0; 3];
            for &i in m {
                for (acc, v) in c.iter_mut().zip(endpoints[i].pos) {
                    *acc += v;
                }
            }
            c.map(|v| v / n)
        })
        .collect();

    // Attach unclustered endpoints that sit near a centroid and face it.
    for (i, ep) in endpoints.iter().enumerate() {
        if labels.labels[i] != Label::Noise {
            continue;
        }
        let best = centroids
            .iter()
            .enumerate()
            .map(|(c, cen)| (c, geom::dist(ep.xy(), [cen[0], cen[1]])))
            .filter(|(c, d)| *d <= eps && ep.aligned_with([centroids[*c][0], centroids[*c][1]]))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((c, _)) = best {
            members[c].push(i);
        }
    }

    let mut junctions = Vec::new();
    for (c, m) in members.iter_mut().enumerate() {
        m.sort_unstable();
        if m.len() < 2 {
            continue;
        }
        let id = format!("J{}", junctions.len());
        let links: Vec<EndpointLink> = m
            .iter()
            .map(|&i| EndpointLink {
                lane: endpoints[i].lane.clone(),
                end: endpoints[i].end,
            })
            .collect();
        let mut connections = Vec::new();
        for &a in m.iter().filter(|&&i| endpoints[i].end == LaneEnd::End) {
            for &b in m.iter().filter(|&&i| endpoints[i].end == LaneEnd::Start) {
                let turn = wrap_angle(endpoints[b].heading - endpoints[a].heading).abs();
                if turn <= MAX_TURN {
                    connections.push(Connection {
                        from: endpoints[a].lane.clone(),
                        to: endpoints[b].lane.clone(),
                    });
                }
            }
        }
        junctions.push(Junction {
            id,
            centroid: centroids[c],
            endpoint_links: links,
            connections,
        });
    }

    let mut out = network.clone();
    let index: BTreeMap<String, usize> = out.lanes.iter().enumerate().map(|(i, l)| (l.id.clone(), i)).collect();
    for lane in &mut out.lanes {
        lane.start_junction = None;
        lane.end_junction = None;
        lane.successors.clear();
        lane.predecessors.clear();
    }
    for j in &junctions {
        for link in &j.endpoint_links {
            let lane = &mut out.lanes[index[&link.lane]];
            match link.end {
                LaneEnd::Start => lane.start_junction = Some(j.id.clone()),
                LaneEnd::End => lane.end_junction = Some(j.id.clone()),
            }
        }
        for conn in &j.connections {
            out.lanes[index[&conn.from]].successors.push(conn.to.clone());
            out.lanes[index[&conn.to]].predecessors.push(conn.from.clone());
        }
    }
    out.junctions = junctions;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::{GeoOrigin, Lane};

    fn lane(id: &str, a: Point2, b: Point2) -> Lane {
        Lane::from_polyline(id, 3.5, &[a, b], 1.0, 1.0).unwrap()
    }

    #[test]
    fn isolated_lane_yields_no_junction() {
        let net = RoadNetwork::new(GeoOrigin::default(), vec![lane("a", [0.0, 0.0], [50.0, 0.0])], vec![], vec![]).unwrap();
        let out = infer_junctions(&net, 5.0, 2);
        assert!(out.junctions.is_empty());
        // min_pts = 1 makes every endpoint its own cluster, all pruned
        assert!(infer_junctions(&net, 5.0, 1).junctions.is_empty());
    }

    #[test]
    fn chained_lanes_get_a_connection() {
        let net = RoadNetwork::new(
            GeoOrigin::default(),
            vec![lane("a", [0.0, 0.0], [50.0, 0.0]), lane("b", [50.5, 0.0], [100.0, 0.0])],
            vec![],
            vec![],
        )
        .unwrap();
        let out = infer_junctions(&net, 5.0, 2);
        assert_eq!(out.junctions.len(), 1);
        let j = &out.junctions[0];
        assert_eq!(j.connections, vec![Connection { from: "a".into(), to: "b".into() }]);
        assert!((j.centroid[0] - 50.25).abs() < 1e-12);
        assert_eq!(out.lane("a").unwrap().successors, vec!["b".to_string()]);
        assert_eq!(out.lane("b").unwrap().predecessors, vec!["a".to_string()]);
        assert_eq!(out.lane("a").unwrap().end_junction.as_deref(), Some("J0"));
        out.validate().unwrap();
    }

    #[test]
    fn noise_endpoint_links_only_when_facing_the_centroid() {
        // a/b cluster at x ~ 49.7; c ends 3.2 m off the centroid but more
        // than eps from both members, so it is DBSCAN noise.
        let build = |c_start: Point2| {
            let net = RoadNetwork::new(
                GeoOrigin::default(),
                vec![
                    lane("a", [0.0, 0.0], [48.0, 0.0]),
                    lane("b", [51.4, 0.0], [100.0, 0.0]),
                    lane("c", c_start, [49.7, 3.2]),
                ],
                vec![],
                vec![],
            )
            .unwrap();
            infer_junctions(&net, 3.5, 2)
        };
        let away = build([49.7, -20.0]);
        assert_eq!(away.junctions.len(), 1);
        assert_eq!(away.junctions[0].endpoint_links.len(), 2);
        let toward = build([49.7, 30.0]);
        assert_eq!(toward.junctions[0].endpoint_links.len(), 3);
        assert_eq!(toward.lane("c").unwrap().end_junction.as_deref(), Some("J0"));
    }
}
