//! Small planar geometry helpers shared by the road, safety and control code.

use std::f64::consts::PI;

pub type Point2 = [f64; 2];

#[inline]
pub fn sub(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn dot(a: Point2, b: Point2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point2, b: Point2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Point2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: Point2, b: Point2) -> f64 {
    norm(sub(a, b))
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Closest point on segment `a`-`b` to `p`, as (parameter in [0, 1], distance).
pub fn project_on_segment(p: Point2, a: Point2, b: Point2) -> (f64, f64) {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let t = if len2 > 0.0 {
        (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
    (t, dist(p, q))
}

/// Euclidean distance from `p` to a convex counterclockwise polygon; zero inside.
pub fn distance_to_convex_polygon(p: Point2, polygon: &[Point2]) -> f64 {
    let n = polygon.len();
    let inside = (0..n).all(|i| {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        cross(sub(b, a), sub(p, a)) >= 0.0
    });
    if inside {
        return 0.0;
    }
    (0..n)
        .map(|i| project_on_segment(p, polygon[i], polygon[(i + 1) % n]).1)
        .fold(f64::INFINITY, f64::min)
}

/// Twice the signed area of a polygon (positive for counterclockwise order).
pub fn signed_area2(polygon: &[Point2]) -> f64 {
    let n = polygon.len();
    (0..n)
        .map(|i| cross(polygon[i], polygon[(i + 1) % n]))
        .sum()
}

/// Cumulative arc length along a polyline, starting at zero.
pub fn cumulative_arc(points: &[Point2]) -> Vec<f64> {
    let mut out = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            acc += dist(points[i - 1], *p);
        }
        out.push(acc);
    }
    out
}
