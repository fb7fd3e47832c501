use serde::{Deserialize, Serialize};

use super::osm::{OsmDraft, OsmWay};
use crate::error::Result;
use crate::geom::{self, Point2};
use crate::roadnet::{GeoOrigin, Lane, RoadNetwork, DEFAULT_MAX_SPACING};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DraftDefaults {
    pub width: f64,
    pub friction: f64,
    pub max_spacing: f64,
    /// Local frame anchor; the mean of all node coordinates when absent.
    pub origin: Option<GeoOrigin>,
}

impl Default for DraftDefaults {
    fn default() -> Self {
        DraftDefaults {
            width: 3.5,
            friction: 1.0,
            max_spacing: DEFAULT_MAX_SPACING,
            origin: None,
        }
    }
}

/// One lane per way and direction. Two-way roads get their lanes offset by
/// half a lane width to the right of travel; one-way roads run on the node
/// polyline itself.
pub fn build_draft_network(draft: &OsmDraft, defaults: &DraftDefaults) -> Result<RoadNetwork> {
    let origin = defaults.origin.unwrap_or_else(|| mean_origin(draft));
    let mut lanes = Vec::new();
    for way in &draft.ways {
        let pts: Vec<Point2> = way
            .nodes
            .iter()
            .map(|id| {
                let (lat, lon) = draft.nodes[id];
                origin.to_local(lat, lon)
            })
            .collect();
        let oneway = way.is_oneway();
        let width = lane_width(way, oneway, defaults.width);
        let friction = way
            .tag("friction")
            .and_then(|v| v.parse::<f64>().ok())
            .filter(|f| *f >= 0.0)
            .unwrap_or(defaults.friction);
        if oneway {
            lanes.push(Lane::from_polyline(
                format!("w{}_f", way.id),
                width,
                &pts,
                friction,
                defaults.max_spacing,
            )?);
        } else {
            let fwd = offset_polyline(&pts, -width / 2.0);
            let rev: Vec<Point2> = pts.iter().rev().copied().collect();
            let back = offset_polyline(&rev, -width / 2.0);
            lanes.push(Lane::from_polyline(format!("w{}_f", way.id), width, &fwd, friction, defaults.max_spacing)?);
            lanes.push(Lane::from_polyline(format!("w{}_b", way.id), width, &back, friction, defaults.max_spacing)?);
        }
    }
    RoadNetwork::new(origin, lanes, Vec::new(), Vec::new())
}

fn lane_width(way: &OsmWay, oneway: bool, default: f64) -> f64 {
    let carriageway = way
        .tag("width")
        .and_then(|v| v.trim_end_matches('m').trim().parse::<f64>().ok())
        .filter(|w| *w > 0.0);
    match carriageway {
        Some(w) => {
            let count = way
                .tag("lanes")
                .and_then(|v| v.parse::<u32>().ok())
                .filter(|n| *n > 0)
                .unwrap_or(if oneway { 1 } else { 2 });
            w / count as f64
        }
        None => default,
    }
}

fn mean_origin(draft: &OsmDraft) -> GeoOrigin {
    if draft.nodes.is_empty() {
        return GeoOrigin::default();
    }
    let n = draft.nodes.len() as f64;
    let (lat, lon) = draft
        .nodes
        .values()
        .fold((0.0, 0.0), |acc, (la, lo)| (acc.0 + la, acc.1 + lo));
    GeoOrigin {
        lat: lat / n,
        lon: lon / n,
    }
}

/// Offsets a polyline sideways (positive to the left) with mitered joints.
pub(crate) fn offset_polyline(pts: &[Point2], offset: f64) -> Vec<Point2> {
    let n = pts.len();
    let normals: Vec<Point2> = pts
        .windows(2)
        .map(|w| {
            let d = geom::sub(w[1], w[0]);
            let len = geom::norm(d).max(f64::MIN_POSITIVE);
            [-d[1] / len, d[0] / len]
        })
        .collect();
    (0..n)
        .map(|i| {
            let m = if i == 0 {
                normals[0]
            } else if i == n - 1 {
                normals[n - 2]
            } else {
                let (a, b) = (normals[i - 1], normals[i]);
                let sum = [a[0] + b[0], a[1] + b[1]];
                let len = geom::norm(sum);
                if len < 1e-9 {
                    a
                } else {
                    // Miter length grows as 1/cos of the half turn angle; cap it.
                    let cos_half = (len / 2.0).max(0.25);
                    [sum[0] / len / cos_half, sum[1] / len / cos_half]
                }
            };
            [pts[i][0] + offset * m[0], pts[i][1] + offset * m[1]]
        })
        .collect()
}
