//! Python bindings: road networks, map building, TTC estimators, scenario
//! runs and the comparison report.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use roadtwin::cosim;
use roadtwin::dynamics::{ControlInput, VehicleParams};
use roadtwin::mapbuild::{self, DraftDefaults, FusionConfig, SensorProfile};
use roadtwin::roadnet::{self, UniformSlope};
use roadtwin::safety::{self, Counterpart, HfConfig, ScenarioMetrics, TtcParty};
use roadtwin::scenario;

fn to_py(e: roadtwin::Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct VehicleState {
    inner: roadtwin::dynamics::VehicleState,
}

#[pymethods]
impl VehicleState {
    #[new]
    #[pyo3(signature = (x, y, psi, v, z = 0.0))]
    fn new(x: f64, y: f64, psi: f64, v: f64, z: f64) -> Self {
        VehicleState {
            inner: roadtwin::dynamics::VehicleState::new(x, y, z, psi, v),
        }
    }

    #[getter]
    fn x(&self) -> f64 {
        self.inner.x
    }
    #[getter]
    fn y(&self) -> f64 {
        self.inner.y
    }
    #[getter]
    fn z(&self) -> f64 {
        self.inner.z
    }
    #[getter]
    fn psi(&self) -> f64 {
        self.inner.psi
    }
    #[getter]
    fn v(&self) -> f64 {
        self.inner.v
    }

    /// Advance by `dt` under constant acceleration and steering on a
    /// uniform grade (rise over run).
    #[pyo3(signature = (accel, steer, dt, grade = 0.0))]
    fn step(&self, accel: f64, steer: f64, dt: f64, grade: f64) -> PyResult<Self> {
        let next = roadtwin::dynamics::rk4_step(
            &self.inner,
            &ControlInput::new(accel, steer),
            &UniformSlope(grade.atan()),
            &VehicleParams::default(),
            dt,
        )
        .map_err(to_py)?;
        Ok(VehicleState { inner: next })
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!("VehicleState(x={}, y={}, z={}, psi={}, v={})", s.x, s.y, s.z, s.psi, s.v)
    }
}

#[pyclass(skip_from_py_object)]
struct RoadNetwork {
    inner: roadnet::RoadNetwork,
}

#[pymethods]
impl RoadNetwork {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(RoadNetwork {
            inner: roadnet::RoadNetwork::from_json(text).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(RoadNetwork {
            inner: roadnet::RoadNetwork::load(path).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn lane_ids(&self) -> Vec<String> {
        self.inner.lane_ids().into_iter().map(String::from).collect()
    }

    fn junction_ids(&self) -> Vec<String> {
        self.inner.junctions.iter().map(|j| j.id.clone()).collect()
    }

    /// Endpoint link count of every junction, keyed by id.
    fn junction_links<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for j in &self.inner.junctions {
            d.set_item(&j.id, j.endpoint_links.len())?;
        }
        Ok(d)
    }

    fn lane_length(&self, lane: &str) -> PyResult<f64> {
        self.inner
            .lane(lane)
            .map(|l| l.length())
            .ok_or_else(|| PyValueError::new_err(format!("unknown lane `{lane}`")))
    }

    /// Interpolated pose at arc length `s`: x, y, z, heading, slope,
    /// superelevation, curvature and friction.
    fn pose_at<'py>(&self, py: Python<'py>, lane: &str, s: f64) -> PyResult<Bound<'py, PyDict>> {
        let p = self.inner.pose_at(lane, s).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("x", p.x)?;
        d.set_item("y", p.y)?;
        d.set_item("z", p.z)?;
        d.set_item("heading", p.heading)?;
        d.set_item("slope", p.slope)?;
        d.set_item("superelevation", p.superelevation)?;
        d.set_item("curvature", p.curvature)?;
        d.set_item("friction", p.friction)?;
        Ok(d)
    }

    /// `(errors, warnings)` of the topology check.
    fn validate_topology(&self) -> (Vec<String>, Vec<String>) {
        let r = mapbuild::validate_topology(&self.inner);
        (r.errors, r.warnings)
    }

    fn __len__(&self) -> usize {
        self.inner.lanes.len()
    }
}

/// Lane network from an OSM XML document, optionally fused with a sensor
/// CSV, with junctions inferred by endpoint clustering.
#[pyfunction]
#[pyo3(signature = (osm, sensor_csv = None, eps = mapbuild::DEFAULT_JUNCTION_EPS, min_pts = mapbuild::DEFAULT_JUNCTION_MIN_PTS))]
fn build_map(osm: &str, sensor_csv: Option<&str>, eps: f64, min_pts: usize) -> PyResult<RoadNetwork> {
    let draft = mapbuild::parse_osm_subset(osm).map_err(to_py)?;
    let mut net = mapbuild::build_draft_network(&draft, &DraftDefaults::default()).map_err(to_py)?;
    if let Some(csv) = sensor_csv {
        let profile = SensorProfile::from_csv(csv.as_bytes()).map_err(to_py)?;
        net = mapbuild::fuse_sensor_profile(&net, &profile, &FusionConfig::default()).map_err(to_py)?;
    }
    Ok(RoadNetwork {
        inner: mapbuild::infer_junctions(&net, eps, min_pts),
    })
}

/// Cluster index per point, `None` for noise.
#[pyfunction]
fn dbscan(points: Vec<(f64, f64)>, eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    let pts: Vec<[f64; 2]> = points.into_iter().map(|(x, y)| [x, y]).collect();
    mapbuild::dbscan(&pts, eps, min_pts).labels.into_iter().map(|l| l.cluster()).collect()
}

/// Curvature and slope RMSE/MAE of an estimated network against a reference.
#[pyfunction]
fn geometry_errors<'py>(
    py: Python<'py>,
    estimated: PyRef<'py, RoadNetwork>,
    reference: PyRef<'py, RoadNetwork>,
) -> PyResult<Bound<'py, PyDict>> {
    let m = roadnet::geometry_error_metrics(&estimated.inner, &reference.inner).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("curvature_mae", m.curvature_mae)?;
    d.set_item("curvature_rmse", m.curvature_rmse)?;
    d.set_item("slope_mae", m.slope_mae)?;
    d.set_item("slope_rmse", m.slope_rmse)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (a, b, length_a = 4.7, length_b = 4.7, horizon = safety::DEFAULT_HORIZON))]
fn traditional_ttc(
    a: PyRef<'_, VehicleState>,
    b: PyRef<'_, VehicleState>,
    length_a: f64,
    length_b: f64,
    horizon: f64,
) -> Option<f64> {
    safety::traditional_ttc_value(&a.inner, &b.inner, length_a, length_b, horizon)
}

/// Contact time predicted by integrating both vehicles with frozen
/// `(accel, steer)` controls on a uniform grade.
#[pyfunction]
#[pyo3(signature = (ego, other, ego_control = (0.0, 0.0), other_control = (0.0, 0.0), grade = 0.0, horizon = safety::DEFAULT_HORIZON, dt = safety::DEFAULT_TTC_DT))]
fn high_fidelity_ttc(
    ego: PyRef<'_, VehicleState>,
    other: PyRef<'_, VehicleState>,
    ego_control: (f64, f64),
    other_control: (f64, f64),
    grade: f64,
    horizon: f64,
    dt: f64,
) -> PyResult<Option<f64>> {
    let party = |id: &str, s: &VehicleState, c: (f64, f64)| TtcParty {
        id: id.into(),
        state: s.inner,
        control: ControlInput::new(c.0, c.1),
        params: VehicleParams::default(),
    };
    let cfg = HfConfig {
        dt,
        horizon,
        ..HfConfig::default()
    };
    safety::high_fidelity_ttc_value(
        &party("ego", &ego, ego_control),
        &Counterpart::Vehicle(party("other", &other, other_control)),
        &UniformSlope(grade.atan()),
        &cfg,
    )
    .map_err(to_py)
}

/// Scenario JSON of a reference preset, `"I"` through `"VIII"`.
#[pyfunction]
fn preset(id: &str) -> PyResult<String> {
    Ok(scenario::preset(id).map_err(to_py)?.to_json())
}

fn metrics_dict<'py>(py: Python<'py>, m: &ScenarioMetrics) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("scenario", &m.scenario)?;
    d.set_item("traditional", m.traditional)?;
    d.set_item("simulated", m.simulated)?;
    d.set_item("high_fidelity", m.high_fidelity)?;
    Ok(d)
}

/// Runs a scenario document with an inline road and returns the trace and
/// event CSVs plus the TTC metrics (or `None` when nothing triggered).
#[pyfunction]
#[pyo3(signature = (document, seed = None))]
fn run_scenario<'py>(py: Python<'py>, document: &str, seed: Option<u64>) -> PyResult<Bound<'py, PyDict>> {
    let spec = scenario::load_scenario(document).map_err(to_py)?;
    let net = spec.build_network(None).map_err(to_py)?;
    let sc = spec.resolve(&net).map_err(to_py)?;
    let mut cfg = spec.sim_config();
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let log = py.detach(|| cosim::run(&net, &sc, &cfg)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("trace_csv", log.trace_csv())?;
    d.set_item("events_csv", log.events_csv())?;
    d.set_item("collisions", log.collisions.len())?;
    match &log.metrics {
        Some(m) => d.set_item("metrics", metrics_dict(py, m)?)?,
        None => d.set_item("metrics", py.None())?,
    }
    Ok(d)
}

type Row = (String, Option<f64>, Option<f64>, Option<f64>);

fn rows_to_metrics(rows: Vec<Row>) -> Vec<ScenarioMetrics> {
    rows.into_iter()
        .map(|(scenario, traditional, simulated, high_fidelity)| ScenarioMetrics {
            scenario,
            traditional,
            simulated,
            high_fidelity,
        })
        .collect()
}

/// Text table of `(scenario, traditional, simulated, high_fidelity)` rows.
#[pyfunction]
fn report(rows: Vec<Row>) -> PyResult<String> {
    Ok(scenario::report(&rows_to_metrics(rows)).map_err(to_py)?.render_table())
}

/// Mean error, MAE and RMSE of both estimators against the simulated TTC.
#[pyfunction]
fn error_stats<'py>(py: Python<'py>, rows: Vec<Row>) -> PyResult<Bound<'py, PyDict>> {
    let s = safety::error_stats(&rows_to_metrics(rows)).map_err(to_py)?;
    let d = PyDict::new(py);
    for (name, e) in [("traditional", s.traditional), ("high_fidelity", s.high_fidelity)] {
        let inner = PyDict::new(py);
        inner.set_item("mean_error", e.mean_error)?;
        inner.set_item("mae", e.mae)?;
        inner.set_item("rmse", e.rmse)?;
        d.set_item(name, inner)?;
    }
    d.set_item("count", s.count)?;
    Ok(d)
}

#[pymodule]
fn roadtwin_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<VehicleState>()?;
    m.add_class::<RoadNetwork>()?;
    m.add_function(wrap_pyfunction!(build_map, m)?)?;
    m.add_function(wrap_pyfunction!(dbscan, m)?)?;
    m.add_function(wrap_pyfunction!(geometry_errors, m)?)?;
    m.add_function(wrap_pyfunction!(traditional_ttc, m)?)?;
    m.add_function(wrap_pyfunction!(high_fidelity_ttc, m)?)?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_function(wrap_pyfunction!(error_stats, m)?)?;
    Ok(())
}
