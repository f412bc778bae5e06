use ffprog_core::schedule::{
    budget_condition, delta_schedule, exponent_negativity, pow2, schedule_report, worked_example_constraints,
    LevelDeltas, Rational,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn every_dyadic_grid_point_has_negative_exponents() {
    let mut failures = vec![];
    for s in 2..=8 {
        for i in 0..=6 {
            for j in 0..=6 {
                let params = delta_schedule(s, &pow2(-i), &pow2(-j)).unwrap();
                let rep = exponent_negativity(&params).unwrap();
                if !rep.all_hold {
                    failures.push((s, i, j));
                }
                assert!(params.levels.iter().all(LevelDeltas::is_ordered));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn worked_tuple_meets_its_constraints() {
    let d = LevelDeltas { d1: r(1, 8), d2: r(1, 256), d3: r(1, 128), d4: r(1, 16) };
    let cs = worked_example_constraints(&d);
    assert_eq!(cs.len(), 5);
    assert!(cs.iter().all(|c| c.holds), "{cs:?}");
    let bad = LevelDeltas { d1: r(1, 2), ..d };
    assert!(worked_example_constraints(&bad).iter().any(|c| !c.holds));
}

#[test]
fn budget_lhs_decreases_in_q() {
    let params = delta_schedule(3, &r(1, 2), &r(1, 2)).unwrap();
    for ell in 2..=3 {
        let d = params.level(ell).unwrap();
        let mut prev = f64::INFINITY;
        for e in [2.0, 4.0, 8.0, 16.0, 64.0, 256.0] {
            let lhs = budget_condition(d, 10f64.powf(e)).unwrap().lhs;
            assert!(lhs < prev);
            prev = lhs;
        }
        // The condition eventually holds for huge q.
        assert!(budget_condition(d, 1e300).unwrap().ok || prev < 2.0);
    }
    assert!(budget_condition(params.level(2).unwrap(), 1.0).is_err());
}

#[test]
fn report_is_consistent() {
    let rep = schedule_report(4, 0.25, 0.5, 1e8, None, 1.0).unwrap();
    assert!(rep.exponents_negative);
    assert_eq!(rep.trajectory.len(), 4);
    assert_eq!(rep.trajectory.last().unwrap().ell, 1);
    assert_eq!(rep.final_bound.u1_exponent, 0.5);
    assert_eq!(rep.deltas.len(), 3);
    let text = serde_json::to_string(&rep).unwrap();
    let back: ffprog_core::schedule::ScheduleReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rep);
}

proptest! {
    #[test]
    fn random_dyadic_parameters_are_sound(s in 2u32..=8, i in 0i64..=12, j in 0i64..=12) {
        let params = delta_schedule(s, &pow2(-i), &pow2(-j)).unwrap();
        prop_assert!(exponent_negativity(&params).unwrap().all_hold);
    }
}
