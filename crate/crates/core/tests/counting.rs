mod common;

use common::{field, random_bounded, rng};
use ffprog_core::counting::{
    base_case_report, count_progressions, lambda_average, main_term_error, rewrite_check, weil_sum, Rewrite, YRule,
};
use ffprog_core::func::{indicator_idx, DenseFunction};
use ffprog_core::rng::{below, bernoulli_subset};
use ffprog_core::{Error, IntPoly, PolySystem};
use num_complex::Complex64;

fn brute_count(system: &PolySystem, p: u64, set: &[usize], y_rule: YRule) -> u64 {
    let inside = |v: i128| set.contains(&(v.rem_euclid(p as i128) as usize));
    let mut n = 0;
    for &x in set {
        let first = if y_rule == YRule::Nonzero { 1 } else { 0 };
        for y in first..p {
            let ok = system.p.iter().all(|poly| {
                let v: i128 = poly.coeffs().iter().rev().fold(0i128, |acc, c| {
                    let c: i128 = c.try_into().unwrap();
                    (acc * y as i128 + c).rem_euclid(p as i128)
                });
                inside(x as i128 + v)
            });
            n += u64::from(ok);
        }
    }
    n
}

#[test]
fn lambda_of_indicators_counts_progressions() {
    let systems = ["y", "y,2y", "y,y^2", "y,y^2,y^3", "2y^2+y"];
    for p in [5u64, 7] {
        let f = field(p, 1);
        for src in systems {
            let system = PolySystem::parse(src, "").unwrap();
            // Exhaustive over all subsets at p = 5, a sample at p = 7.
            let subsets: Vec<u64> = if p == 5 { (0..32).collect() } else { (0..128).step_by(5).collect() };
            for mask in subsets {
                let set: Vec<usize> = (0..p as usize).filter(|i| mask >> i & 1 == 1).collect();
                let a = indicator_idx(&f, &set).unwrap();
                let fs = vec![a; system.m1() + 1];
                let lam = lambda_average(&system, &fs, &[]).unwrap();
                let exact = count_progressions(&system, &f, &set, YRule::All).unwrap();
                assert_eq!(exact, brute_count(&system, p, &set, YRule::All));
                assert_eq!((lam.re * (p * p) as f64).round() as u64, exact, "{src} {set:?}");
                assert!(lam.im.abs() < 1e-12);
                let nz = count_progressions(&system, &f, &set, YRule::Nonzero).unwrap();
                assert_eq!(nz + set.len() as u64, exact, "y = 0 contributes one per element");
            }
        }
    }
}

#[test]
fn counts_in_extension_fields() {
    let f = field(3, 2);
    let system = PolySystem::parse("y,y^2", "").unwrap();
    assert_eq!(count_progressions(&system, &f, &(0..9).collect::<Vec<_>>(), YRule::All).unwrap(), 81);
    let set = [0, 1, 5];
    let lam = lambda_average(&system, &vec![indicator_idx(&f, &set).unwrap(); 3], &[]).unwrap();
    assert_eq!((lam.re * 81.0).round() as u64, count_progressions(&system, &f, &set, YRule::All).unwrap());
}

#[test]
fn lambda_is_multilinear() {
    let f = field(11, 1);
    let system = PolySystem::parse("y,y^2", "y^3").unwrap();
    let mut r = rng(9);
    let fs: Vec<DenseFunction> = (0..3).map(|_| random_bounded(&f, &mut r)).collect();
    let gs = vec![random_bounded(&f, &mut r)];
    let extra = random_bounded(&f, &mut r);
    let c = Complex64::new(0.7, 0.2);
    for slot in 0..3 {
        let mut mixed = fs.clone();
        mixed[slot] = fs[slot].add(&extra.scale(c)).unwrap();
        let mut other = fs.clone();
        other[slot] = extra.clone();
        let lhs = lambda_average(&system, &mixed, &gs).unwrap();
        let rhs = lambda_average(&system, &fs, &gs).unwrap() + c * lambda_average(&system, &other, &gs).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn arity_and_field_errors() {
    let f = field(7, 1);
    let g = field(11, 1);
    let system = PolySystem::parse("y,y^2", "").unwrap();
    let one = DenseFunction::constant(&f, Complex64::new(1.0, 0.0));
    assert!(matches!(lambda_average(&system, &[one.clone(), one.clone()], &[]), Err(Error::ArityMismatch { .. })));
    let other = DenseFunction::constant(&g, Complex64::new(1.0, 0.0));
    assert!(matches!(lambda_average(&system, &[one.clone(), one, other], &[]), Err(Error::FieldMismatch)));
    let twisted = PolySystem::parse("y", "y^2").unwrap();
    assert!(matches!(count_progressions(&twisted, &f, &[0], YRule::All), Err(Error::TwistedSystem)));
}

#[test]
fn rewrite_battery() {
    let systems = [("y,y^2", "y^3"), ("y,2y", "y^2"), ("y,y^2,y^3", "y^4"), ("y^2,y^3", "y,y^4"), ("y", "y^2")];
    let mut r = rng(2024);
    for (case, (ps, qs)) in systems.iter().cycle().take(40).enumerate() {
        let system = PolySystem::parse(ps, qs).unwrap();
        let f = if case % 2 == 0 { field(11, 1) } else { field(3, 2) };
        let fs: Vec<DenseFunction> = (0..=system.m1()).map(|_| random_bounded(&f, &mut r)).collect();
        let psi: Vec<usize> = (0..system.m2()).map(|_| below(&mut r, f.q())).collect();
        let k = 1 + case % system.m1();
        let phi = below(&mut r, f.q());
        for rw in [Rewrite::AbsorbIntoFirst, Rewrite::AbsorbIntoLast, Rewrite::Shift { k }, Rewrite::FourierShift { k, phi }] {
            let rep = rewrite_check(&system, &fs, &psi, rw).unwrap();
            assert!(rep.max_abs_diff <= 1e-10, "{ps} | {qs}: {rep:?}");
        }
    }
}

#[test]
fn main_term_vanishes_for_nontrivial_twists() {
    let f = field(13, 1);
    let system = PolySystem::parse("y,y^2", "y^3").unwrap();
    let set = bernoulli_subset(&mut rng(1), 13, 0.5);
    let trivial = main_term_error(&system, &f, &set, &[0]).unwrap();
    let a = set.len() as f64 / 13.0;
    assert!((trivial.main_term.re - a.powi(3)).abs() < 1e-12);
    let twisted = main_term_error(&system, &f, &set, &[4]).unwrap();
    assert_eq!(twisted.main_term, Complex64::new(0.0, 0.0));
    assert!((twisted.count_error - twisted.error * 169.0).norm() < 1e-9);
}

#[test]
fn weil_bound_for_monomials_and_mixtures() {
    for p in [5u64, 7, 11, 13, 17, 19, 23] {
        let f = field(p, 1);
        for d in 1..=4u32.min(p as u32 - 1) {
            let poly = IntPoly::monomial(1, d as usize);
            for a in 1..p as usize {
                let rep = weil_sum(&f, std::slice::from_ref(&poly), &[a]).unwrap();
                assert!(rep.within_bound && rep.value.norm() <= rep.bound + 1e-12, "p={p} d={d} a={a}");
            }
        }
        let polys = [IntPoly::monomial(1, 1), IntPoly::monomial(1, 2), IntPoly::monomial(1, 3)];
        let rep = weil_sum(&f, &polys, &[1, 2, 3]).unwrap();
        assert_eq!(rep.degree, 3);
        assert!(rep.within_bound);
    }
    let f = field(5, 2);
    let rep = weil_sum(&f, &[IntPoly::monomial(1, 2)], &[7]).unwrap();
    assert!(rep.value.norm() <= rep.bound + 1e-12);
    assert!(weil_sum(&f, &[IntPoly::monomial(1, 1)], &[0]).unwrap().trivial);
}

#[test]
fn weil_rejects_degenerate_combinations() {
    let f = field(5, 1);
    let polys = [IntPoly::monomial(1, 1), IntPoly::from_i64(&[0, 2])];
    assert!(matches!(weil_sum(&f, &polys, &[3, 1]), Err(Error::DegenerateCombination { p: 5 })));
    assert!(matches!(weil_sum(&f, &[IntPoly::monomial(1, 5)], &[1]), Err(Error::ThresholdViolation { .. })));
}

#[test]
fn base_case_error_decays() {
    let p1 = IntPoly::monomial(1, 1);
    let qs = [IntPoly::monomial(1, 2)];
    for p in [11u64, 31, 61] {
        let f = field(p, 1);
        let mut r = rng(p);
        for _ in 0..5 {
            let f0 = random_bounded(&f, &mut r);
            let f1 = random_bounded(&f, &mut r);
            let psi = [1 + below(&mut r, p as usize - 1)];
            let rep = base_case_report(&p1, &qs, &f0, &f1, &psi).unwrap();
            assert_eq!(rep.main, Complex64::new(0.0, 0.0));
            // Fourier bound: |Lambda| <= max_b |E psi(b y + a y^2)| <= q^{-1/2}.
            assert!(rep.scaled_error <= 1.0 + 1e-9, "p={p}: {rep:?}");
            let triv = base_case_report(&p1, &qs, &f0, &f1, &[0]).unwrap();
            assert!((triv.main - f0.mean() * f1.mean()).norm() < 1e-15);
        }
    }
}
