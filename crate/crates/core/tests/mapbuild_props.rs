mod common;

use proptest::prelude::*;

use common::{canonical, fixture, library_labels, reference_dbscan};
use roadtwin::mapbuild::{
    build_draft_network, dbscan, infer_junctions, parse_osm_subset, validate_topology, DraftDefaults,
    DEFAULT_JUNCTION_EPS, DEFAULT_JUNCTION_MIN_PTS,
};
use roadtwin::roadnet::RoadNetwork;

fn cross_network() -> RoadNetwork {
    let text = std::fs::read_to_string(fixture("cross.osm")).unwrap();
    let draft = parse_osm_subset(&text).unwrap();
    let net = build_draft_network(&draft, &DraftDefaults::default()).unwrap();
    infer_junctions(&net, DEFAULT_JUNCTION_EPS, DEFAULT_JUNCTION_MIN_PTS)
}

fn points() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((0.0f64..50.0, 0.0f64..50.0).prop_map(|(x, y)| [x, y]), 0..120)
}

/// Cluster membership as a set of sorted member lists, ignoring numbering.
fn partition(labels: &[Option<usize>]) -> Vec<Vec<usize>> {
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, l) in labels.iter().enumerate() {
        if let Some(c) = l {
            groups.entry(*c).or_default().push(i);
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

proptest! {
    #[test]
    fn dbscan_matches_reference(pts in points(), eps in 0.5f64..6.0, min_pts in 1usize..6) {
        let lib = dbscan(&pts, eps, min_pts);
        prop_assert_eq!(canonical(&library_labels(&lib.labels)), canonical(&reference_dbscan(&pts, eps, min_pts)));
    }

    #[test]
    fn core_structure_is_order_independent(pts in points(), eps in 0.5f64..6.0, min_pts in 1usize..6, seed in any::<u64>()) {
        // Only border points may change cluster under reordering, so compare
        // the partitions of points that have at least min_pts neighbours.
        let n = pts.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut state = seed | 1;
        for i in (1..n).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            perm.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let shuffled: Vec<[f64; 2]> = perm.iter().map(|&i| pts[i]).collect();
        let a = library_labels(&dbscan(&pts, eps, min_pts).labels);
        let b_shuffled = library_labels(&dbscan(&shuffled, eps, min_pts).labels);
        let mut b = vec![None; n];
        for (k, &i) in perm.iter().enumerate() {
            b[i] = b_shuffled[k];
        }
        let is_core = |i: usize| {
            pts.iter().filter(|q| (q[0] - pts[i][0]).powi(2) + (q[1] - pts[i][1]).powi(2) <= eps * eps).count() >= min_pts
        };
        let keep = |l: &[Option<usize>]| (0..n).map(|i| if is_core(i) { l[i] } else { None }).collect::<Vec<_>>();
        prop_assert_eq!(partition(&keep(&a)), partition(&keep(&b)));
        // Noise is noise in any order.
        for i in 0..n {
            prop_assert_eq!(a[i].is_none(), b[i].is_none());
        }
    }
}

#[test]
fn four_way_fixture_gives_one_junction() {
    let net = cross_network();
    assert_eq!(net.lanes.len(), 8);
    assert_eq!(net.junctions.len(), 1);
    let j = &net.junctions[0];
    assert_eq!(j.endpoint_links.len(), 8);
    // Four approaches, three exits each; U-turns exceed the turn limit.
    assert_eq!(j.connections.len(), 12);
    assert!(j.centroid[0].abs() < 0.5 && j.centroid[1].abs() < 0.5, "{:?}", j.centroid);
    let report = validate_topology(&net);
    assert!(report.is_ok(), "{:?}", report.errors);
}

#[test]
fn junction_inference_is_idempotent() {
    let once = cross_network();
    let twice = infer_junctions(&once, DEFAULT_JUNCTION_EPS, DEFAULT_JUNCTION_MIN_PTS);
    assert_eq!(once, twice);
}

#[test]
fn isolated_dead_end_has_no_junction() {
    let osm = r#"<osm version="0.6">
      <node id="1" lat="30.6" lon="-96.3"/>
      <node id="2" lat="30.6" lon="-96.299"/>
      <way id="3"><nd ref="1"/><nd ref="2"/><tag k="highway" v="service"/><tag k="oneway" v="yes"/></way>
    </osm>"#;
    let draft = parse_osm_subset(osm).unwrap();
    let net = build_draft_network(&draft, &DraftDefaults::default()).unwrap();
    let net = infer_junctions(&net, DEFAULT_JUNCTION_EPS, DEFAULT_JUNCTION_MIN_PTS);
    assert!(net.junctions.is_empty());
    assert!(net.lanes[0].successors.is_empty() && net.lanes[0].end_junction.is_none());
    let report = validate_topology(&net);
    assert!(report.is_ok());
    assert!(!report.warnings.is_empty(), "dead ends are reported as warnings");
}
