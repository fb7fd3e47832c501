use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-linear curve through `[x, y]` points, held constant outside
/// the first and last point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Curve(Vec<[f64; 2]>);

impl Curve {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Validation("curve needs at least one point".into()));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Validation("curve has non-finite points".into()));
        }
        if points.windows(2).any(|w| !(w[1][0] > w[0][0])) {
            return Err(Error::Validation("curve x values must be strictly increasing".into()));
        }
        Ok(Curve(points))
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        let p = &self.0;
        if x <= p[0][0] {
            return p[0][1];
        }
        let last = p[p.len() - 1];
        if x >= last[0] {
            return last[1];
        }
        let i = p.partition_point(|q| q[0] <= x);
        let (a, b) = (p[i - 1], p[i]);
        a[1] + (x - a[0]) / (b[0] - a[0]) * (b[1] - a[1])
    }
}

impl TryFrom<Vec<[f64; 2]>> for Curve {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Curve::new(v)
    }
}

impl From<Curve> for Vec<[f64; 2]> {
    fn from(c: Curve) -> Self {
        c.0
    }
}
