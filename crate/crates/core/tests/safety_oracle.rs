mod common;

use proptest::prelude::*;

use common::{brute_force_ttc, constant_velocity_ttc, party, OracleTarget};
use roadtwin::dynamics::VehicleState;
use roadtwin::roadnet::{ObstacleRegion, UniformSlope};
use roadtwin::safety::{high_fidelity_ttc_value, traditional_ttc_obstacle, traditional_ttc_value, Counterpart, HfConfig};

fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs() <= tol,
        (None, None) => true,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rear_end_matches_brute_force(
        ve in 5.0f64..25.0,
        ae in -4.0f64..1.0,
        gap in 12.0f64..50.0,
        vl in 0.0f64..15.0,
        al in -3.0f64..1.0,
        grade in -0.2f64..0.2,
    ) {
        let ego = party("e", VehicleState::new(0.0, 0.0, 0.0, 0.0, ve), ae, 0.0);
        let lead = party("l", VehicleState::new(gap, 0.0, 0.0, 0.0, vl), al, 0.0);
        let theta = grade.atan();
        let cfg = HfConfig::default();
        let got = high_fidelity_ttc_value(&ego, &Counterpart::Vehicle(lead.clone()), &UniformSlope(theta), &cfg).unwrap();
        let want = brute_force_ttc(&ego, OracleTarget::Vehicle(&lead), theta, 1e-4, cfg.horizon);
        prop_assert!(close(got, want, 1e-3), "{got:?} vs {want:?}");
    }

    #[test]
    fn obstacle_matches_brute_force(
        v in 3.0f64..20.0,
        a in -3.0f64..1.5,
        steer in -0.05f64..0.05,
        dist in 10.0f64..60.0,
        grade in -0.2f64..0.2,
    ) {
        let poly = [[dist, -4.0], [dist + 2.0, -4.0], [dist + 2.0, 4.0], [dist, 4.0]];
        let region = ObstacleRegion::new("box", poly.to_vec()).unwrap();
        let ego = party("e", VehicleState::new(0.0, 0.0, 0.0, 0.0, v), a, steer);
        let theta = grade.atan();
        let cfg = HfConfig::default();
        let got = high_fidelity_ttc_value(&ego, &Counterpart::Obstacle(region), &UniformSlope(theta), &cfg).unwrap();
        let want = brute_force_ttc(&ego, OracleTarget::Polygon(&poly), theta, 1e-4, cfg.horizon);
        prop_assert!(close(got, want, 1e-3), "{got:?} vs {want:?}");
    }
}

proptest! {
    #[test]
    fn traditional_matches_quadratic_formula(
        ax in -50.0f64..50.0, ay in -50.0f64..50.0, apsi in -3.1f64..3.1, av in 0.0f64..30.0,
        bx in -50.0f64..50.0, by in -50.0f64..50.0, bpsi in -3.1f64..3.1, bv in 0.0f64..30.0,
    ) {
        let a = VehicleState::new(ax, ay, 0.0, apsi, av);
        let b = VehicleState::new(bx, by, 0.0, bpsi, bv);
        let got = traditional_ttc_value(&a, &b, 4.7, 4.7, 10.0);
        let want = constant_velocity_ttc(&a, &b, 4.7, 10.0);
        prop_assert!(close(got, want, 1e-9), "{got:?} vs {want:?}");
    }

    #[test]
    fn traditional_obstacle_agrees_with_linear_motion(
        v in 0.5f64..30.0,
        dist in 5.0f64..80.0,
        half_width in 0.5f64..6.0,
    ) {
        let poly = vec![[dist, -half_width], [dist + 3.0, -half_width], [dist + 3.0, half_width], [dist, half_width]];
        let region = ObstacleRegion::new("r", poly).unwrap();
        let z = VehicleState::new(0.0, 0.0, 0.0, 0.0, v);
        let expected = (dist - 4.7 / 2.0) / v;
        let got = traditional_ttc_obstacle(&z, 4.7, &region, 1000.0).unwrap();
        prop_assert!((got - expected).abs() < 1e-6, "{got} vs {expected}");
    }
}

#[test]
fn overlapping_parties_report_zero() {
    let a = party("a", VehicleState::new(0.0, 0.0, 0.0, 0.0, 0.0), 0.0, 0.0);
    let b = party("b", VehicleState::new(3.0, 0.0, 0.0, 0.0, 0.0), 0.0, 0.0);
    let cfg = HfConfig::default();
    let hf = high_fidelity_ttc_value(&a, &Counterpart::Vehicle(b.clone()), &UniformSlope(0.0), &cfg).unwrap();
    assert_eq!(hf, Some(0.0));
    assert_eq!(traditional_ttc_value(&a.state, &b.state, 4.7, 4.7, 10.0), Some(0.0));
}

#[test]
fn diverging_parties_never_meet() {
    let a = party("a", VehicleState::new(0.0, 0.0, 0.0, std::f64::consts::PI, 10.0), 0.0, 0.0);
    let b = party("b", VehicleState::new(20.0, 0.0, 0.0, 0.0, 10.0), 0.0, 0.0);
    let cfg = HfConfig::default();
    assert_eq!(
        high_fidelity_ttc_value(&a, &Counterpart::Vehicle(b.clone()), &UniformSlope(0.0), &cfg).unwrap(),
        None
    );
    assert_eq!(traditional_ttc_value(&a.state, &b.state, 4.7, 4.7, 10.0), None);
}
