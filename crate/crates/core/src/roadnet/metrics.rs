//! Lane geometry accuracy: curvature and slope errors of an estimated
//! network against a reference, compared at matched 1 m stations.

use serde::{Deserialize, Serialize};

use super::{Lane, RoadNetwork};
use crate::error::{Error, Result};
use crate::stats::ErrorSummary;

const STATION_SPACING: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneGeometryErrors {
    pub lane: String,
    pub stations: usize,
    pub curvature: ErrorSummary,
    /// Slope errors in radians.
    pub slope: ErrorSummary,
    /// Slope errors as percent grade (100 * tan).
    pub slope_percent: ErrorSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryMetrics {
    pub lanes: Vec<LaneGeometryErrors>,
    pub curvature_mae: f64,
    pub curvature_rmse: f64,
    pub slope_mae: f64,
    pub slope_rmse: f64,
    pub slope_percent_mae: f64,
    pub slope_percent_rmse: f64,
}

pub fn geometry_error_metrics(estimated: &RoadNetwork, reference: &RoadNetwork) -> Result<GeometryMetrics> {
    let est_ids = estimated.lane_ids();
    let ref_ids = reference.lane_ids();
    if est_ids != ref_ids {
        let missing: Vec<&str> = est_ids.symmetric_difference(&ref_ids).copied().collect();
        return Err(Error::Validation(format!(
            "lane ids differ between networks: {}",
            missing.join(", ")
        )));
    }
    let mut lanes = Vec::new();
    for est in estimated.lanes_by_id() {
        let reference = reference.lane(&est.id).expect("ids matched");
        lanes.push(lane_errors(est, reference)?);
    }
    let n = lanes.len().max(1) as f64;
    let avg = |f: &dyn Fn(&LaneGeometryErrors) -> f64| lanes.iter().map(f).sum::<f64>() / n;
    Ok(GeometryMetrics {
        curvature_mae: avg(&|l| l.curvature.mae),
        curvature_rmse: avg(&|l| l.curvature.rmse),
        slope_mae: avg(&|l| l.slope.mae),
        slope_rmse: avg(&|l| l.slope.rmse),
        slope_percent_mae: avg(&|l| l.slope_percent.mae),
        slope_percent_rmse: avg(&|l| l.slope_percent.rmse),
        lanes,
    })
}

fn lane_errors(est: &Lane, reference: &Lane) -> Result<LaneGeometryErrors> {
    let length = est.length().min(reference.length());
    let count = (length / STATION_SPACING + 1e-9).floor() as usize + 1;
    let mut dk = Vec::with_capacity(count);
    let mut ds = Vec::with_capacity(count);
    let mut dp = Vec::with_capacity(count);
    for i in 0..count {
        let offset = i as f64 * STATION_SPACING;
        let a = est.pose_at(est.start_s() + offset)?;
        let b = reference.pose_at(reference.start_s() + offset)?;
        dk.push(a.curvature - b.curvature);
        ds.push(a.slope - b.slope);
        dp.push(100.0 * (a.slope.tan() - b.slope.tan()));
    }
    Ok(LaneGeometryErrors {
        lane: est.id.clone(),
        stations: count,
        curvature: ErrorSummary::from_errors(&dk),
        slope: ErrorSummary::from_errors(&ds),
        slope_percent: ErrorSummary::from_errors(&dp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::GeoOrigin;

    fn net(bias: f64) -> RoadNetwork {
        let mut a = Lane::from_polyline("a", 3.5, &[[0.0, 0.0], [20.0, 0.0]], 1.0, 1.0).unwrap();
        let b = Lane::from_polyline("b", 3.5, &[[0.0, 5.0], [20.0, 5.0]], 1.0, 1.0).unwrap();
        for c in &mut a.samples {
            c.slope += bias;
        }
        RoadNetwork::new(GeoOrigin::default(), vec![a, b], vec![], vec![]).unwrap()
    }

    #[test]
    fn identical_networks_score_zero() {
        let m = geometry_error_metrics(&net(0.0), &net(0.0)).unwrap();
        assert_eq!(m.curvature_rmse, 0.0);
        assert_eq!(m.slope_rmse, 0.0);
        assert_eq!(m.lanes[0].stations, 21);
    }

    #[test]
    fn constant_bias() {
        let m = geometry_error_metrics(&net(0.1), &net(0.0)).unwrap();
        let a = &m.lanes[0];
        assert!((a.slope.mae - 0.1).abs() < 1e-12);
        assert!((a.slope.rmse - 0.1).abs() < 1e-12);
        assert_eq!(m.lanes[1].slope.mae, 0.0);
        assert!((m.slope_mae - 0.05).abs() < 1e-12);
        assert!((a.slope_percent.mae - 100.0 * 0.1f64.tan()).abs() < 1e-9);
    }

    #[test]
    fn mismatched_ids_are_listed() {
        let mut other = net(0.0);
        other.lanes[1].id = "c".into();
        let err = geometry_error_metrics(&net(0.0), &other).unwrap_err().to_string();
        assert!(err.contains('b') && err.contains('c'), "{err}");
    }
}
