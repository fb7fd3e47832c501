//! Lane-level 3D road network.
//!
//! Lanes carry arc-length-parameterized centerlines with slope, superelevation,
//! curvature and friction at every station. The network is immutable once
//! built and is shared read-only by the traffic, dynamics and safety code.

mod io;
mod metrics;
mod query;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Point2};

pub use metrics::{geometry_error_metrics, GeometryMetrics, LaneGeometryErrors};
pub use query::{curvature_from_polyline, LaneLocation, Pose};
pub(crate) use query::interp as query_interp;

/// Default maximum spacing between consecutive centerline samples (m).
pub const DEFAULT_MAX_SPACING: f64 = 1.0;
/// Default distance within which a point counts as on the network (m).
pub const DEFAULT_PROJECTION_TOLERANCE: f64 = 10.0;

const EARTH_RADIUS: f64 = 6_371_000.0;

/// One station of a lane centerline. Serialized as a 9-element array in
/// field order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 9]", into = "[f64; 9]")]
pub struct CenterlineSample {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub heading: f64,
    /// Inclination along the direction of increasing `s`, positive uphill.
    pub slope: f64,
    pub superelevation: f64,
    pub curvature: f64,
    pub friction: f64,
}

impl From<[f64; 9]> for CenterlineSample {
    fn from(v: [f64; 9]) -> Self {
        CenterlineSample {
            s: v[0],
            x: v[1],
            y: v[2],
            z: v[3],
            heading: v[4],
            slope: v[5],
            superelevation: v[6],
            curvature: v[7],
            friction: v[8],
        }
    }
}

impl From<CenterlineSample> for [f64; 9] {
    fn from(c: CenterlineSample) -> Self {
        [
            c.s,
            c.x,
            c.y,
            c.z,
            c.heading,
            c.slope,
            c.superelevation,
            c.curvature,
            c.friction,
        ]
    }
}

impl CenterlineSample {
    pub fn xy(&self) -> Point2 {
        [self.x, self.y]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lane {
    pub id: String,
    pub width: f64,
    pub samples: Vec<CenterlineSample>,
    #[serde(default)]
    pub predecessors: Vec<String>,
    #[serde(default)]
    pub successors: Vec<String>,
    #[serde(default)]
    pub start_junction: Option<String>,
    #[serde(default)]
    pub end_junction: Option<String>,
}

impl Lane {
    pub fn length(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.s - a.s,
            _ => 0.0,
        }
    }

    pub fn start_s(&self) -> f64 {
        self.samples.first().map_or(0.0, |c| c.s)
    }

    pub fn end_s(&self) -> f64 {
        self.samples.last().map_or(0.0, |c| c.s)
    }

    pub fn first(&self) -> &CenterlineSample {
        &self.samples[0]
    }

    pub fn last(&self) -> &CenterlineSample {
        &self.samples[self.samples.len() - 1]
    }

    pub fn polyline(&self) -> Vec<Point2> {
        self.samples.iter().map(|c| c.xy()).collect()
    }

    /// Checks sample ordering, spacing and field ranges.
    pub fn validate(&self, max_spacing: f64) -> Result<()> {
        if self.samples.len() < 2 {
            return Err(Error::Validation(format!(
                "lane `{}` has {} samples, need at least 2",
                self.id,
                self.samples.len()
            )));
        }
        if !(self.width > 0.0) {
            return Err(Error::Validation(format!(
                "lane `{}` has non-positive width {}",
                self.id, self.width
            )));
        }
        for (i, c) in self.samples.iter().enumerate() {
            let fields: [f64; 9] = (*c).into();
            if fields.iter().any(|f| !f.is_finite()) {
                return Err(Error::Validation(format!(
                    "lane `{}` sample {i} has a non-finite field",
                    self.id
                )));
            }
            if c.slope.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(Error::Validation(format!(
                    "lane `{}` sample {i}: |slope| must be below pi/2",
                    self.id
                )));
            }
            if c.friction < 0.0 {
                return Err(Error::Validation(format!(
                    "lane `{}` sample {i}: negative friction",
                    self.id
                )));
            }
            if i > 0 {
                let ds = c.s - self.samples[i - 1].s;
                if !(ds > 0.0) {
                    return Err(Error::Validation(format!(
                        "lane `{}` sample {i}: arc length not strictly increasing",
                        self.id
                    )));
                }
                if ds > max_spacing * (1.0 + 1e-9) {
                    return Err(Error::Validation(format!(
                        "lane `{}` sample {i}: spacing {ds:.4} m exceeds {max_spacing} m",
                        self.id
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaneEnd {
    Start,
    End,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointLink {
    pub lane: String,
    pub end: LaneEnd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Connection {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Junction {
    pub id: String,
    pub centroid: [f64; 3],
    pub endpoint_links: Vec<EndpointLink>,
    #[serde(default)]
    pub connections: Vec<Connection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleRegion {
    pub id: String,
    /// Convex polygon, counterclockwise.
    pub polygon: Vec<Point2>,
}

impl ObstacleRegion {
    pub fn new(id: impl Into<String>, polygon: Vec<Point2>) -> Result<Self> {
        let region = ObstacleRegion {
            id: id.into(),
            polygon,
        };
        region.validate()?;
        Ok(region)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.polygon.len();
        if n < 3 {
            return Err(Error::Validation(format!(
                "obstacle `{}` needs at least 3 vertices",
                self.id
            )));
        }
        for i in 0..n {
            let a = self.polygon[i];
            let b = self.polygon[(i + 1) % n];
            let c = self.polygon[(i + 2) % n];
            if geom::cross(geom::sub(b, a), geom::sub(c, b)) <= 0.0 {
                return Err(Error::Validation(format!(
                    "obstacle `{}` is not a convex counterclockwise polygon (vertex {})",
                    self.id,
                    (i + 1) % n
                )));
            }
        }
        Ok(())
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.polygon.len() as f64;
        let sx: f64 = self.polygon.iter().map(|p| p[0]).sum();
        let sy: f64 = self.polygon.iter().map(|p| p[1]).sum();
        [sx / n, sy / n]
    }
}

/// Geodetic anchor of the local planar frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoOrigin {
    pub lat: f64,
    pub lon: f64,
}

impl GeoOrigin {
    /// Equirectangular projection of (lat, lon) degrees into local meters.
    pub fn to_local(&self, lat: f64, lon: f64) -> Point2 {
        let phi0 = self.lat.to_radians();
        let x = EARTH_RADIUS * phi0.cos() * (lon - self.lon).to_radians();
        let y = EARTH_RADIUS * (lat - self.lat).to_radians();
        [x, y]
    }

    pub fn to_geodetic(&self, p: Point2) -> (f64, f64) {
        let phi0 = self.lat.to_radians();
        let lat = self.lat + (p[1] / EARTH_RADIUS).to_degrees();
        let lon = self.lon + (p[0] / (EARTH_RADIUS * phi0.cos())).to_degrees();
        (lat, lon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadNetwork {
    pub origin: GeoOrigin,
    pub lanes: Vec<Lane>,
    #[serde(default)]
    pub junctions: Vec<Junction>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleRegion>,
}

impl RoadNetwork {
    /// Builds a network and checks every invariant.
    pub fn new(
        origin: GeoOrigin,
        lanes: Vec<Lane>,
        junctions: Vec<Junction>,
        obstacles: Vec<ObstacleRegion>,
    ) -> Result<Self> {
        let net = RoadNetwork {
            origin,
            lanes,
            junctions,
            obstacles,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn empty(origin: GeoOrigin) -> Self {
        RoadNetwork {
            origin,
            lanes: Vec::new(),
            junctions: Vec::new(),
            obstacles: Vec::new(),
        }
    }

    pub fn lane(&self, id: &str) -> Option<&Lane> {
        self.lanes.iter().find(|l| l.id == id)
    }

    pub fn junction(&self, id: &str) -> Option<&Junction> {
        self.junctions.iter().find(|j| j.id == id)
    }

    pub fn obstacle(&self, id: &str) -> Option<&ObstacleRegion> {
        self.obstacles.iter().find(|o| o.id == id)
    }

    pub fn lane_ids(&self) -> BTreeSet<&str> {
        self.lanes.iter().map(|l| l.id.as_str()).collect()
    }

    /// Lane indices ordered by lexicographic id, the tie-break order for
    /// every nearest-lane query.
    pub(crate) fn lanes_by_id(&self) -> Vec<&Lane> {
        let mut v: Vec<&Lane> = self.lanes.iter().collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    /// Checks lane geometry, id uniqueness and that every reference resolves.
    pub fn validate(&self) -> Result<()> {
        self.validate_with_spacing(DEFAULT_MAX_SPACING)
    }

    pub fn validate_with_spacing(&self, max_spacing: f64) -> Result<()> {
        let mut ids = BTreeMap::new();
        for lane in &self.lanes {
            if ids.insert(lane.id.as_str(), ()).is_some() {
                return Err(Error::Validation(format!("duplicate lane id `{}`", lane.id)));
            }
            lane.validate(max_spacing)?;
        }
        let junction_ids: BTreeSet<&str> = self.junctions.iter().map(|j| j.id.as_str()).collect();
        if junction_ids.len() != self.junctions.len() {
            return Err(Error::Validation("duplicate junction id".into()));
        }
        for lane in &self.lanes {
            for r in lane.predecessors.iter().chain(&lane.successors) {
                if !ids.contains_key(r.as_str()) {
                    return Err(Error::Validation(format!(
                        "lane `{}` references unknown lane `{r}`",
                        lane.id
                    )));
                }
            }
            for j in lane.start_junction.iter().chain(&lane.end_junction) {
                if !junction_ids.contains(j.as_str()) {
                    return Err(Error::Validation(format!(
                        "lane `{}` references unknown junction `{j}`",
                        lane.id
                    )));
                }
            }
        }
        for j in &self.junctions {
            if j.endpoint_links.len() < 2 {
                return Err(Error::Validation(format!(
                    "junction `{}` has fewer than 2 endpoint links",
                    j.id
                )));
            }
            let lanes = j
                .endpoint_links
                .iter()
                .map(|l| &l.lane)
                .chain(j.connections.iter().flat_map(|c| [&c.from, &c.to]));
            for l in lanes {
                if !ids.contains_key(l.as_str()) {
                    return Err(Error::Validation(format!(
                        "junction `{}` references unknown lane `{l}`",
                        j.id
                    )));
                }
            }
        }
        for o in &self.obstacles {
            o.validate()?;
        }
        Ok(())
    }
}

/// Source of road inclination for the dynamics integrators.
pub trait SlopeField: Sync {
    fn slope(&self, x: f64, y: f64) -> f64;
}

/// Constant inclination everywhere; zero is flat ground.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UniformSlope(pub f64);

impl SlopeField for UniformSlope {
    fn slope(&self, _x: f64, _y: f64) -> f64 {
        self.0
    }
}

impl SlopeField for RoadNetwork {
    /// Slope at the nearest on-network projection; points off the network
    /// are treated as flat.
    fn slope(&self, x: f64, y: f64) -> f64 {
        self.slope_at([x, y]).unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_round_trip() {
        let o = GeoOrigin {
            lat: 30.6,
            lon: -96.3,
        };
        let p = o.to_local(30.601, -96.299);
        assert!((p[1] - 111.19).abs() < 0.1);
        let (lat, lon) = o.to_geodetic(p);
        assert!((lat - 30.601).abs() < 1e-12 && (lon + 96.299).abs() < 1e-12);
    }

    #[test]
    fn obstacle_convexity() {
        assert!(ObstacleRegion::new("sq", vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).is_ok());
        // clockwise
        assert!(ObstacleRegion::new("cw", vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).is_err());
        // dent
        assert!(ObstacleRegion::new(
            "dent",
            vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.5], [2.0, 2.0], [0.0, 2.0]]
        )
        .is_err());
        assert!(ObstacleRegion::new("two", vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
    }
}
