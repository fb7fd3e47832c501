mod common;

use proptest::prelude::*;

use common::{run_platoon, straight_network};
use roadtwin::traffic::{ballistic_distance, car_following_accel, npc_step, NpcParams, NpcVehicle};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn platoon_never_overlaps(
        time_gap in 0.8f64..2.5,
        s0 in 1.0f64..6.0,
        v_start in 10.0f64..25.0,
        v_leader in 0.0f64..25.0,
    ) {
        let r = run_platoon(time_gap, s0, v_start, v_leader, 60.0, 0.1);
        prop_assert!(r.min_gap >= 0.0, "min gap {}", r.min_gap);
        prop_assert!(r.final_speeds.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn ballistic_distance_never_negative(v in 0.0f64..40.0, a in -10.0f64..5.0, dt in 0.01f64..1.0) {
        let d = ballistic_distance(v, a, dt);
        prop_assert!(d >= 0.0);
        // Never farther than an unbraked vehicle at the higher of both speeds.
        prop_assert!(d <= v.max(v + a * dt) * dt + 1e-12);
    }

    #[test]
    fn following_acceleration_is_bounded(gap in -5.0f64..200.0, v in 0.0f64..40.0, v_lead in 0.0f64..40.0) {
        let p = NpcParams::default();
        let (a, closed) = car_following_accel(Some((gap, v_lead)), v, &p);
        prop_assert!(a <= p.a_max + 1e-12 && a >= -p.b_max - 1e-12);
        prop_assert_eq!(closed, gap <= 0.0);
    }
}

#[test]
fn platoon_settles_to_new_equilibrium() {
    for (t, s0) in [(1.0, 2.5), (2.0, 5.0)] {
        let r = run_platoon(t, s0, 20.0, 15.0, 120.0, 0.1);
        let target = s0 + t * 15.0;
        for g in &r.final_gaps {
            assert!((g - target).abs() <= 0.02 * target, "gap {g} vs {target}");
        }
        for v in &r.final_speeds {
            assert!((v - 15.0).abs() < 0.05, "speed {v}");
        }
    }
}

#[test]
fn lone_vehicle_reaches_desired_speed() {
    let net = straight_network(2000.0);
    let params = NpcParams {
        v_des: 12.0,
        ..NpcParams::default()
    };
    let mut npcs = vec![NpcVehicle::new("solo", vec!["L".into()], 10.0, 0.0, params)];
    for k in 0..300 {
        npcs = npc_step(&net, &npcs, &[], k as f64 * 0.1, 0.1).unwrap();
    }
    assert!((npcs[0].v - 12.0).abs() < 1e-4, "{}", npcs[0].v);
}

#[test]
fn stopped_leader_brings_follower_to_rest_behind_it() {
    let net = straight_network(2000.0);
    let lead = NpcVehicle::new(
        "a",
        vec!["L".into()],
        300.0,
        0.0,
        NpcParams {
            v_des: 0.0,
            ..NpcParams::default()
        },
    );
    let follower = NpcVehicle::new("b", vec!["L".into()], 100.0, 15.0, NpcParams::default());
    let mut npcs = vec![lead, follower];
    for k in 0..1200 {
        npcs = npc_step(&net, &npcs, &[], k as f64 * 0.1, 0.1).unwrap();
    }
    let gap = npcs[0].s - npcs[1].s - npcs[0].params.length;
    assert!(gap > 0.0 && (gap - npcs[1].params.s0).abs() < 0.1, "gap {gap}");
    assert!(npcs[1].v < 1e-3);
}
