use serde::{Deserialize, Serialize};

use super::{CenterlineSample, Lane, RoadNetwork, DEFAULT_PROJECTION_TOLERANCE};
use crate::error::{Error, Result};
use crate::geom::{self, wrap_angle, Point2};

/// Interpolated lane state at an arc length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub heading: f64,
    pub slope: f64,
    pub superelevation: f64,
    pub curvature: f64,
    pub friction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneLocation {
    pub lane: String,
    pub s: f64,
    /// Positive to the left of the direction of travel.
    pub offset: f64,
}

impl Lane {
    /// Pose at arc length `s`, linear in every scalar field and shortest-arc
    /// in heading.
    pub fn pose_at(&self, s: f64) -> Result<Pose> {
        let (s0, s1) = (self.start_s(), self.end_s());
        if !(s >= s0 && s <= s1) {
            return Err(Error::Range {
                lane: self.id.clone(),
                s,
                length: s1,
            });
        }
        let i = match self.samples.binary_search_by(|c| c.s.total_cmp(&s)) {
            Ok(i) => return Ok(pose_of(&self.samples[i])),
            Err(i) => i,
        };
        let a = &self.samples[i - 1];
        let b = &self.samples[i];
        let t = (s - a.s) / (b.s - a.s);
        let lerp = |u: f64, v: f64| u + t * (v - u);
        Ok(Pose {
            x: lerp(a.x, b.x),
            y: lerp(a.y, b.y),
            z: lerp(a.z, b.z),
            heading: wrap_angle(a.heading + t * wrap_angle(b.heading - a.heading)),
            slope: lerp(a.slope, b.slope),
            superelevation: lerp(a.superelevation, b.superelevation),
            curvature: lerp(a.curvature, b.curvature),
            friction: lerp(a.friction, b.friction),
        })
    }

    /// Pose clamped into the lane's arc-length range.
    pub fn pose_clamped(&self, s: f64) -> Pose {
        let s = s.clamp(self.start_s(), self.end_s());
        self.pose_at(s).expect("clamped arc length is in range")
    }

    /// Closest point on this centerline as (s, signed offset, distance).
    pub fn project(&self, p: Point2) -> (f64, f64, f64) {
        let mut best = (self.start_s(), 0.0, f64::INFINITY);
        for w in self.samples.windows(2) {
            let (a, b) = (w[0].xy(), w[1].xy());
            let (t, d) = geom::project_on_segment(p, a, b);
            if d < best.2 {
                let dir = geom::sub(b, a);
                let side = geom::cross(dir, geom::sub(p, a));
                let offset = if side >= 0.0 { d } else { -d };
                best = (w[0].s + t * (w[1].s - w[0].s), offset, d);
            }
        }
        best
    }
}

fn pose_of(c: &CenterlineSample) -> Pose {
    Pose {
        x: c.x,
        y: c.y,
        z: c.z,
        heading: c.heading,
        slope: c.slope,
        superelevation: c.superelevation,
        curvature: c.curvature,
        friction: c.friction,
    }
}

impl RoadNetwork {
    pub fn pose_at(&self, lane: &str, s: f64) -> Result<Pose> {
        self.lane(lane)
            .ok_or_else(|| Error::Validation(format!("unknown lane `{lane}`")))?
            .pose_at(s)
    }

    /// Nearest centerline location over all lanes. Ties go to the
    /// lexicographically smaller lane id.
    pub fn project_point(&self, p: Point2) -> Result<LaneLocation> {
        self.project_with_distance(p).map(|(loc, _)| loc)
    }

    pub(crate) fn project_with_distance(&self, p: Point2) -> Result<(LaneLocation, f64)> {
        let mut best: Option<(&Lane, f64, f64, f64)> = None;
        for lane in self.lanes_by_id() {
            let (s, offset, d) = lane.project(p);
            if best.is_none_or(|b| d < b.3 - 1e-12) {
                best = Some((lane, s, offset, d));
            }
        }
        let (lane, s, offset, d) = best.ok_or(Error::EmptyNetwork)?;
        Ok((
            LaneLocation {
                lane: lane.id.clone(),
                s,
                offset,
            },
            d,
        ))
    }

    /// Road slope under a planar point, within the default tolerance.
    pub fn slope_at(&self, p: Point2) -> Result<f64> {
        self.slope_at_within(p, DEFAULT_PROJECTION_TOLERANCE)
    }

    pub fn slope_at_within(&self, p: Point2, tolerance: f64) -> Result<f64> {
        Ok(self.pose_under(p, tolerance)?.slope)
    }

    /// Pose of the nearest lane projection, failing for off-network points.
    pub fn pose_under(&self, p: Point2, tolerance: f64) -> Result<Pose> {
        let (loc, d) = match self.project_with_distance(p) {
            Ok(v) => v,
            Err(Error::EmptyNetwork) => {
                return Err(Error::OffNetwork {
                    x: p[0],
                    y: p[1],
                    distance: f64::INFINITY,
                    tolerance,
                })
            }
            Err(e) => return Err(e),
        };
        if d > tolerance {
            return Err(Error::OffNetwork {
                x: p[0],
                y: p[1],
                distance: d,
                tolerance,
            });
        }
        self.pose_at(&loc.lane, loc.s)
    }
}

/// Signed circumscribed-circle curvature at every point of a polyline
/// (left turns positive). Endpoints copy their nearest interior value.
pub fn curvature_from_polyline(points: &[Point2]) -> Result<Vec<f64>> {
    if points.len() < 3 {
        return Err(Error::Validation(format!(
            "curvature needs at least 3 points, got {}",
            points.len()
        )));
    }
    for (i, w) in points.windows(2).enumerate() {
        if w[0] == w[1] {
            return Err(Error::Validation(format!(
                "duplicate consecutive points at index {} and {}",
                i,
                i + 1
            )));
        }
    }
    let mut k = vec![0.0; points.len()];
    for i in 1..points.len() - 1 {
        let (a, b, c) = (points[i - 1], points[i], points[i + 1]);
        let ab = geom::sub(b, a);
        let bc = geom::sub(c, b);
        let ca = geom::sub(a, c);
        let denom = geom::norm(ab) * geom::norm(bc) * geom::norm(ca);
        k[i] = if denom > 0.0 {
            2.0 * geom::cross(ab, bc) / denom
        } else {
            0.0
        };
    }
    let n = k.len();
    k[0] = k[1];
    k[n - 1] = k[n - 2];
    Ok(k)
}

/// Stations along a polyline at spacing no larger than `max_spacing`, as
/// (s, point, heading of the segment leaving the point).
pub(crate) fn resample_polyline(points: &[Point2], max_spacing: f64) -> Vec<(f64, Point2, f64)> {
    let mut out = Vec::new();
    let mut s = 0.0;
    for (i, w) in points.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let len = geom::dist(a, b);
        if len == 0.0 {
            continue;
        }
        let heading = (b[1] - a[1]).atan2(b[0] - a[0]);
        let pieces = (len / max_spacing).ceil().max(1.0) as usize;
        for k in 0..pieces {
            let t = k as f64 / pieces as f64;
            out.push((s + t * len, [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], heading));
        }
        s += len;
        if i == points.len() - 2 {
            out.push((s, b, heading));
        }
    }
    out
}

impl Lane {
    /// Flat lane along a polyline, resampled to `max_spacing`. Curvature is
    /// estimated at the input vertices and interpolated between them.
    pub fn from_polyline(
        id: impl Into<String>,
        width: f64,
        points: &[Point2],
        friction: f64,
        max_spacing: f64,
    ) -> Result<Lane> {
        let id = id.into();
        let mut pts: Vec<Point2> = Vec::with_capacity(points.len());
        for p in points {
            if pts.last() != Some(p) {
                pts.push(*p);
            }
        }
        if pts.len() < 2 {
            return Err(Error::Validation(format!(
                "lane `{id}` needs at least 2 distinct points"
            )));
        }
        let vertex_arc = geom::cumulative_arc(&pts);
        let vertex_k = if pts.len() >= 3 {
            curvature_from_polyline(&pts)?
        } else {
            vec![0.0; pts.len()]
        };
        let samples = resample_polyline(&pts, max_spacing)
            .into_iter()
            .map(|(s, p, heading)| CenterlineSample {
                s,
                x: p[0],
                y: p[1],
                z: 0.0,
                heading,
                slope: 0.0,
                superelevation: 0.0,
                curvature: interp(&vertex_arc, &vertex_k, s),
                friction,
            })
            .collect();
        Ok(Lane {
            id,
            width,
            samples,
            predecessors: Vec::new(),
            successors: Vec::new(),
            start_junction: None,
            end_junction: None,
        })
    }
}

/// Piecewise-linear interpolation with constant extension; `xs` ascending.
pub(crate) fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let n = xs.len();
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
    ys[i - 1] + t * (ys[i] - ys[i - 1])
}
