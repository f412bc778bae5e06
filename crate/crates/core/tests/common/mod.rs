#![allow(dead_code)]

use ffprog_core::func::{DenseFunction, TwoVarFunction};
use ffprog_core::rng::{seeded, unit_disk, unit_phase, SplitMix64};
use ffprog_core::{make_field, Field};
use num_complex::Complex64;

pub fn field(p: u64, k: usize) -> Field {
    make_field(p, k, None).unwrap()
}

pub fn field_of_order(q: usize) -> Field {
    match q {
        25 => field(5, 2),
        27 => field(3, 3),
        49 => field(7, 2),
        9 => field(3, 2),
        8 => field(2, 3),
        _ => field(q as u64, 1),
    }
}

/// Values uniform in the closed unit disk.
pub fn random_bounded(f: &Field, rng: &mut SplitMix64) -> DenseFunction {
    let vals: Vec<Complex64> = (0..f.q()).map(|_| unit_disk(rng)).collect();
    DenseFunction::new(f.clone(), vals).unwrap()
}

pub fn random_phase(f: &Field, rng: &mut SplitMix64) -> DenseFunction {
    let vals: Vec<Complex64> = (0..f.q()).map(|_| unit_phase(rng)).collect();
    DenseFunction::new(f.clone(), vals).unwrap()
}

pub fn random_two_var(f: &Field, rng: &mut SplitMix64) -> TwoVarFunction {
    let q = f.q();
    let vals: Vec<Complex64> = (0..q * q).map(|_| unit_disk(rng)).collect();
    TwoVarFunction::new(f.clone(), vals).unwrap()
}

pub fn rng(seed: u64) -> SplitMix64 {
    seeded(seed)
}
