use super::*;
use crate::dynamics::{ControlInput, VehicleParams, VehicleState};
use crate::roadnet::{Connection, EndpointLink, GeoOrigin, Junction, Lane, LaneEnd, RoadNetwork};
use crate::traffic::{NpcParams, NpcVehicle};

fn straight(len: f64) -> RoadNetwork {
    let lane = Lane::from_polyline("L0", 3.5, &[[0.0, 0.0], [len, 0.0]], 1.0, 1.0).unwrap();
    RoadNetwork::new(GeoOrigin::default(), vec![lane], vec![], vec![]).unwrap()
}

fn params(length: f64) -> VehicleParams {
    VehicleParams {
        length,
        wheelbase: 2.7f64.min(length),
        ..Default::default()
    }
}

fn scripted(cmds: Vec<TimedCommand>) -> EgoController {
    EgoController {
        longitudinal: Longitudinal::Scripted(cmds),
        lateral: Lateral::Constant { steer: 0.0 },
    }
}

fn accel_at(t: f64, a: f64) -> TimedCommand {
    TimedCommand {
        t,
        accel: Some(a),
        throttle: None,
        brake: None,
    }
}

fn ego(x: f64, v: f64, length: f64, cmds: Vec<TimedCommand>) -> EgoVehicle {
    EgoVehicle {
        id: "ego".into(),
        state: VehicleState::new(x, 0.0, 0.0, 0.0, v),
        params: params(length),
        path: vec![],
        controller: scripted(cmds),
        tire_friction: None,
    }
}

fn scenario(egos: Vec<EgoVehicle>, npcs: Vec<NpcVehicle>) -> Scenario {
    Scenario {
        id: "t".into(),
        egos,
        npcs,
        demand: Default::default(),
        signals: vec![],
        trigger: None,
        counterpart: None,
    }
}

fn config(horizon: f64) -> SimConfig {
    SimConfig {
        horizon,
        ..Default::default()
    }
}

#[test]
fn empty_world_advances_time() {
    let net = straight(100.0);
    let sc = scenario(vec![], vec![]);
    let mut w = World::new(&net, &sc, &config(1.0)).unwrap();
    for _ in 0..3 {
        assert!(w.engine_step().unwrap().is_empty());
    }
    assert!((w.time() - 0.3).abs() < 1e-15);
    assert!(w.log.steps.iter().all(|s| s.vehicles.is_empty()));
}

#[test]
fn constant_velocity_ego_and_record_count() {
    let net = straight(200.0);
    let sc = scenario(vec![ego(10.0, 10.0, 4.7, vec![accel_at(0.0, 0.0)])], vec![]);
    let mut w = World::new(&net, &sc, &config(1.0)).unwrap();
    for _ in 0..10 {
        w.engine_step().unwrap();
    }
    assert!((w.egos[0].vehicle.state.x - 20.0).abs() < 1e-9);

    let log = run(&net, &sc, &config(1.0)).unwrap();
    assert_eq!(log.steps.len(), 10);
    for (k, s) in log.steps.iter().enumerate() {
        assert_eq!(s.time, k as f64 * 0.1);
    }
}

#[test]
fn closing_on_stopped_vehicle() {
    let net = straight(200.0);
    let lead = NpcVehicle::new(
        "lead",
        vec!["L0".into()],
        64.0,
        0.0,
        NpcParams {
            length: 4.0,
            v_des: 0.0,
            wheelbase: 2.5,
            ..Default::default()
        },
    );
    let sc = scenario(vec![ego(50.0, 10.0, 4.0, vec![accel_at(0.0, 0.0)])], vec![lead]);
    let log = run(&net, &sc, &config(5.0)).unwrap();
    assert_eq!(log.collisions.len(), 1);
    let c = &log.collisions[0];
    assert!((c.time - 1.0).abs() <= 0.1 + 1e-9, "contact at {}", c.time);
    assert!((c.impact_speed - 10.0).abs() < 1e-9);
    assert_eq!(c.participants, ("ego".to_string(), "lead".to_string()));
    assert!(log.steps.len() <= 11);
}

fn body(id: &str, x: f64, psi: f64, v: f64, length: f64) -> Body {
    Body {
        id: id.into(),
        state: VehicleState::new(x, 0.0, 0.0, psi, v),
        control: ControlInput::default(),
        params: params(length),
        theta: 0.0,
    }
}

#[test]
fn collision_check_examples() {
    assert!(collision_check(&[body("a", 0.0, 0.0, 0.0, 4.0), body("b", 100.0, 0.0, 0.0, 4.0)], &[]).is_empty());
    assert_eq!(collision_check(&[body("a", 0.0, 0.0, 0.0, 4.0), body("b", 4.0, 0.0, 0.0, 4.0)], &[]).len(), 1);
    let head_on = collision_check(
        &[body("a", 0.0, 0.0, 5.0, 4.0), body("b", 3.0, std::f64::consts::PI, 5.0, 4.0)],
        &[],
    );
    assert!((head_on[0].impact_speed - 10.0).abs() < 1e-12);
}

#[test]
fn decel_onset_trigger_time() {
    let net = straight(300.0);
    let mut sc = scenario(vec![ego(10.0, 15.0, 4.7, vec![accel_at(0.0, 0.0), accel_at(3.0, -2.0)])], vec![]);
    sc.trigger = Some(TriggerSpec::DecelOnset { threshold: 0.1 });
    let log = run(&net, &sc, &config(5.0)).unwrap();
    assert_eq!(log.trigger.as_ref().unwrap().time, 3.0);
    let spec = TriggerSpec::DecelOnset { threshold: 0.1 };
    assert_eq!(detect_trigger(&log, &spec, "ego", &net).unwrap(), Some(3.0));

    let mut never = sc.clone();
    never.egos[0].controller = scripted(vec![accel_at(0.0, 0.0)]);
    assert!(run(&net, &never, &config(5.0)).unwrap().trigger.is_none());
}

fn junction_ahead() -> RoadNetwork {
    let mut a = Lane::from_polyline("in", 6.0, &[[0.0, 0.0], [45.0, 0.0]], 1.0, 1.0).unwrap();
    let mut b = Lane::from_polyline("out", 6.0, &[[55.0, 0.0], [150.0, 0.0]], 1.0, 1.0).unwrap();
    a.end_junction = Some("J".into());
    b.start_junction = Some("J".into());
    let j = Junction {
        id: "J".into(),
        centroid: [50.0, 0.0, 0.0],
        endpoint_links: vec![
            EndpointLink { lane: "in".into(), end: LaneEnd::End },
            EndpointLink { lane: "out".into(), end: LaneEnd::Start },
        ],
        connections: vec![Connection { from: "in".into(), to: "out".into() }],
    };
    RoadNetwork::new(GeoOrigin::default(), vec![a, b], vec![j], vec![]).unwrap()
}

#[test]
fn junction_entry_trigger_time() {
    let net = junction_ahead();
    assert!((junction_radius(&net, "J").unwrap() - 8.0).abs() < 1e-12);
    let mut sc = scenario(vec![ego(0.0, 10.0, 4.7, vec![accel_at(0.0, 0.0)])], vec![]);
    sc.trigger = Some(TriggerSpec::JunctionEntry { junction: "J".into() });
    let log = run(&net, &sc, &config(8.0)).unwrap();
    let t = log.trigger.unwrap().time;
    assert!((t - 4.2).abs() <= 0.1 + 1e-9, "trigger at {t}");

    sc.trigger = Some(TriggerSpec::JunctionEntry { junction: "nope".into() });
    assert!(matches!(run(&net, &sc, &config(8.0)), Err(crate::Error::Config(_))));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let net = straight(200.0);
    let lead = NpcVehicle::new("lead", vec!["L0".into()], 80.0, 5.0, NpcParams::default());
    let sc = scenario(vec![ego(20.0, 12.0, 4.7, vec![accel_at(0.0, 0.3)])], vec![lead]);
    let a = run(&net, &sc, &config(6.0)).unwrap();
    let b = run(&net, &sc, &config(6.0)).unwrap();
    assert_eq!(a.trace_csv(), b.trace_csv());
    assert_eq!(a.events_csv(), b.events_csv());
}

#[test]
fn trace_csv_round_trip() {
    let net = straight(200.0);
    let sc = scenario(vec![ego(10.0, 10.0, 4.7, vec![accel_at(0.0, -0.5)])], vec![]);
    let log = run(&net, &sc, &config(1.0)).unwrap();
    let rows = parse_trace_csv(&log.trace_csv()).unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[3].x, log.steps[3].vehicles[0].x);
    assert!(parse_trace_csv("bad,header\n").is_err());
    assert!(parse_events_csv(&log.events_csv()).unwrap().is_empty());
}

#[test]
fn micro_substep_convergence() {
    let net = straight(400.0);
    let mut e = ego(10.0, 10.0, 4.7, vec![accel_at(0.0, 1.0), accel_at(2.0, -1.5)]);
    e.controller.lateral = Lateral::Constant { steer: 0.05 };
    let sc = scenario(vec![e], vec![]);
    let fine = SimConfig {
        micro_substeps: 100,
        ..config(5.0)
    };
    let a = run(&net, &sc, &config(5.0)).unwrap();
    let b = run(&net, &sc, &fine).unwrap();
    let (ra, rb) = (a.steps.last().unwrap(), b.steps.last().unwrap());
    let (va, vb) = (&ra.vehicles[0], &rb.vehicles[0]);
    assert!(((va.x - vb.x).powi(2) + (va.y - vb.y).powi(2)).sqrt() < 1e-4);
    assert!((va.v - vb.v).abs() < 1e-5);
}
