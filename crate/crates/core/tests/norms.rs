mod common;

use common::{field, field_of_order, random_bounded, random_phase, random_two_var, rng};
use ffprog_core::func::{fourier_transform, DenseFunction};
use ffprog_core::gowers::{
    check_cs_inequality, cs_project, dual_pairing_search, gowers_norm, gowers_norm_with_budget, gowers_u2_via_fourier,
    u2_dual_upper_bound,
};
use ffprog_core::Error;
use num_complex::Complex64;

#[test]
fn u2_matches_fourier_fourth_moment() {
    for q in [7, 11, 13, 25, 27, 49] {
        let f = field_of_order(q);
        let mut r = rng(100 + q as u64);
        for _ in 0..20 {
            let g = random_bounded(&f, &mut r);
            let naive = gowers_norm(&g, 2).unwrap().value;
            let fourier = gowers_u2_via_fourier(&g).value;
            assert!((naive - fourier).abs() <= 1e-8 * fourier.max(1e-300), "q = {q}: {naive} vs {fourier}");
        }
    }
}

#[test]
fn norms_increase_with_s() {
    for q in [7, 11] {
        let f = field(q, 1);
        let mut r = rng(q);
        for _ in 0..10 {
            let g = random_bounded(&f, &mut r);
            let vals: Vec<f64> = (1..=4).map(|s| gowers_norm(&g, s).unwrap().value).collect();
            for w in vals.windows(2) {
                assert!(w[0] <= w[1] + 1e-9, "{vals:?}");
            }
            assert!(vals.iter().all(|&v| v <= 1.0 + 1e-12), "1-bounded input gives norms at most 1");
        }
    }
}

#[test]
fn u1_is_absolute_mean_and_characters_are_extremal() {
    let f = field(13, 1);
    let g = random_bounded(&f, &mut rng(5));
    assert!((gowers_norm(&g, 1).unwrap().value - g.mean().norm()).abs() < 1e-12);
    // A character has U^2 norm 1 and U^1 norm 0.
    let chi = DenseFunction::character(&f, 3);
    assert!((gowers_norm(&chi, 2).unwrap().value - 1.0).abs() < 1e-12);
    assert!(gowers_norm(&chi, 1).unwrap().value < 1e-12);
    // A quadratic phase is U^2-small but has U^3 norm 1.
    let quad = DenseFunction::from_fn(&f, |x| f.character_idx(1, f.mul_idx(x, x)));
    assert!((gowers_norm(&quad, 3).unwrap().value - 1.0).abs() < 1e-12);
    assert!((gowers_norm(&quad, 2).unwrap().value - 13f64.powf(-0.25)).abs() < 1e-12);
}

#[test]
fn budget_is_enforced() {
    let f = field(13, 1);
    let g = random_bounded(&f, &mut rng(1));
    assert!(matches!(gowers_norm_with_budget(&g, 4, 1e3), Err(Error::BudgetExceeded { .. })));
}

#[test]
fn dual_search_never_beats_the_fourier_bound() {
    for q in [11, 25] {
        let f = field_of_order(q);
        let mut r = rng(q as u64);
        for i in 0..5 {
            let g = random_bounded(&f, &mut r);
            let bound = u2_dual_upper_bound(&g);
            let found = dual_pairing_search(&g, 200, i).unwrap();
            assert!(found <= bound + 1e-10, "{found} > {bound}");
            assert!((bound - fourier_transform(&g).lp_sum(1.0)).abs() < 1e-12);
        }
    }
}

#[test]
fn cs_inequality_on_random_instances() {
    for q in [5, 7] {
        let f = field(q, 1);
        let mut r = rng(7 * q);
        for _ in 0..5 {
            let fs: Vec<_> = (0..2).map(|_| random_two_var(&f, &mut r)).collect();
            let rep = check_cs_inequality(&fs, 3).unwrap();
            assert!(rep.holds && rep.lhs <= rep.rhs + 1e-9, "{rep:?}");
            let eq = check_cs_inequality(&fs, 2).unwrap();
            assert!((eq.lhs - eq.rhs).abs() <= 1e-12 * eq.rhs.max(1.0), "{eq:?}");
        }
    }
}

#[test]
fn projection_of_a_single_function_is_its_column_average() {
    let f = field(7, 1);
    let two = random_two_var(&f, &mut rng(2));
    let proj = cs_project(std::slice::from_ref(&two), &[]).unwrap();
    for x in 0..7 {
        let avg: Complex64 = (0..7).map(|y| two.at(x, y)).sum::<Complex64>() / 7.0;
        assert!((proj.at(x) - avg).norm() < 1e-12);
    }
}

#[test]
fn unimodular_functions_have_unit_l2() {
    let f = field(3, 3);
    let g = random_phase(&f, &mut rng(4));
    assert!(g.is_one_bounded());
    assert!((fourier_transform(&g).lp_sum(2.0) - 1.0).abs() < 1e-12);
}
