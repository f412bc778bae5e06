//! The counting averages `Lambda^Q_P(F; G)`, progression counts, change of
//! variables identities and complete character sums.

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::func::{indicator_idx, DenseFunction};
use crate::par;
use crate::poly::{IntPoly, PolySystem, ProgressionSystem};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum YRule {
    /// Every `y` including `y = 0`.
    #[default]
    All,
    Nonzero,
}

impl std::str::FromStr for YRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(YRule::All),
            "nonzero" => Ok(YRule::Nonzero),
            other => Err(Error::Parse(format!("unknown y rule '{other}' (expected all or nonzero)"))),
        }
    }
}

/// `E_{x,y} f_0(x) prod_i f_i(x + P_i(y)) prod_j g_j(Q_j(y))` for arbitrary
/// integer polynomial lists. No validation of the lists themselves.
pub fn lambda_raw(field: &Field, ps: &[IntPoly], fs: &[DenseFunction], qs: &[IntPoly], gs: &[DenseFunction]) -> Result<Complex64> {
    if fs.len() != ps.len() + 1 {
        return Err(Error::ArityMismatch { expected: ps.len() + 1, got: fs.len() });
    }
    if gs.len() != qs.len() {
        return Err(Error::ArityMismatch { expected: qs.len(), got: gs.len() });
    }
    if fs.iter().chain(gs).any(|f| f.field() != field) {
        return Err(Error::FieldMismatch);
    }
    let q = field.q();
    let tables: Vec<Vec<usize>> = ps.iter().map(|p| p.value_table(field)).collect();
    let qtables: Vec<Vec<usize>> = qs.iter().map(|p| p.value_table(field)).collect();
    let weight: Vec<Complex64> = (0..q).map(|y| qtables.iter().zip(gs).map(|(t, g)| g.at(t[y])).product()).collect();
    let zero = Complex64::new(0.0, 0.0);
    let partial = par::map_range(q, |x| {
        let f0 = fs[0].at(x);
        if f0 == zero {
            return zero;
        }
        let mut acc = zero;
        for (y, &w) in weight.iter().enumerate() {
            if w == zero {
                continue;
            }
            let mut prod = w;
            for (t, f) in tables.iter().zip(&fs[1..]) {
                prod *= f.values()[field.add_idx(x, t[y])];
            }
            acc += prod;
        }
        f0 * acc
    });
    Ok(par::pairwise_sum(&partial) / (q as f64 * q as f64))
}

/// `Lambda^{Q_1..Q_{m2}}_{P_1..P_{m1}}(f_0..f_{m1}; g_1..g_{m2})`.
pub fn lambda_average(system: &PolySystem, fs: &[DenseFunction], gs: &[DenseFunction]) -> Result<Complex64> {
    let field = fs.first().ok_or(Error::ArityMismatch { expected: system.m1() + 1, got: 0 })?.field().clone();
    lambda_raw(&field, &system.p, fs, &system.q, gs)
}

/// `g_j = psi_{a_j}` for each character index.
pub fn character_functions(field: &Field, psi: &[usize]) -> Vec<DenseFunction> {
    psi.iter().map(|&a| DenseFunction::character(field, a)).collect()
}

/// Whether `p` meets the certified threshold of the system. `None` for
/// systems without a certificate (dependent or repeated members).
pub fn threshold_flag(system: &PolySystem, p: u64) -> Option<bool> {
    let certified = ProgressionSystem::new(system.p.clone(), system.q.clone()).ok()?;
    let ok = certified.admits_characteristic(p);
    if !ok {
        log::warn!("characteristic {p} is below the threshold {} of {}", certified.threshold(), system.describe());
    }
    Some(ok)
}

fn membership(q: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut inside = vec![false; q];
    for &a in set {
        *inside.get_mut(a).ok_or(Error::ElementOutOfField)? = true;
    }
    Ok(inside)
}

/// Number of `(x, y)` with `x, x + P_1(y), .., x + P_m(y)` all in the set.
pub fn count_progressions(system: &PolySystem, field: &FieldSpec, set: &[usize], y_rule: YRule) -> Result<u64> {
    if !system.is_pure() {
        return Err(Error::TwistedSystem);
    }
    let q = field.q();
    let inside = membership(q, set)?;
    let tables: Vec<Vec<usize>> = system.p.iter().map(|p| p.value_table(field)).collect();
    let ys: Vec<usize> = match y_rule {
        YRule::All => (0..q).collect(),
        YRule::Nonzero => (1..q).collect(),
    };
    let counts = par::map_range(q, |x| {
        if !inside[x] {
            return 0u64;
        }
        ys.iter().filter(|&&y| tables.iter().all(|t| inside[field.add_idx(x, t[y])])).count() as u64
    });
    Ok(counts.iter().sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaResult {
    pub system: String,
    pub q: usize,
    pub set_size: usize,
    pub value: Complex64,
    pub main_term: Complex64,
    /// `value - main_term`.
    pub error: Complex64,
    /// `q^2 * error`, directly comparable with a progression count.
    pub count_error: Complex64,
}

/// Splits `Lambda(1_A, .., 1_A; psi_{a_1}, ..)` into the main term
/// `1_{all a_j = 0} (|A|/q)^{m1+1}` and the remainder.
pub fn main_term_error(system: &PolySystem, field: &Field, set: &[usize], psi: &[usize]) -> Result<LambdaResult> {
    let a = indicator_idx(field, set)?;
    let size = a.values().iter().filter(|v| v.re != 0.0).count();
    let fs = vec![a; system.m1() + 1];
    let gs = character_functions(field, psi);
    let value = lambda_average(system, &fs, &gs)?;
    let q = field.q();
    let trivial = psi.iter().all(|&c| c == 0);
    let main = if trivial { (size as f64 / q as f64).powi(system.m1() as i32 + 1) } else { 0.0 };
    let main_term = Complex64::new(main, 0.0);
    let error = value - main_term;
    Ok(LambdaResult {
        system: system.describe(),
        q,
        set_size: size,
        value,
        main_term,
        error,
        count_error: error * (q as f64 * q as f64),
    })
}

/// A change of variables turning one counting average into another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Rewrite {
    /// `f_0 -> f_0 prod_j conj(psi_j)` with the untwisted system `P, Q`.
    AbsorbIntoFirst,
    /// `f_{m1} -> f_{m1} prod_j conj(psi_j)` with polynomials `Q_j + P_{m1}`.
    AbsorbIntoLast,
    /// `x -> x - P_k(y)`: polynomials `-P_k, P_i - P_k` and `f_k` in front.
    Shift { k: usize },
    /// `f_0 = conj(psi_phi)` followed by `x -> x - P_k(y)`: the character
    /// leaves as a new twist `psi_phi(P_k(y))` and multiplies `f_k`.
    FourierShift { k: usize, phi: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewriteReport {
    pub rewrite: Rewrite,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub max_abs_diff: f64,
}

fn conj_product(field: &Field, base: &DenseFunction, psi: &[usize]) -> DenseFunction {
    DenseFunction::from_fn(field, |x| psi.iter().fold(base.at(x), |acc, &a| acc * field.character_idx(a, x).conj()))
}

/// Evaluates both sides of a rewrite of `Lambda^Q_P(F; psi_Psi)`.
pub fn rewrite_check(system: &PolySystem, fs: &[DenseFunction], psi: &[usize], rewrite: Rewrite) -> Result<RewriteReport> {
    let m1 = system.m1();
    if psi.len() != system.m2() {
        return Err(Error::ArityMismatch { expected: system.m2(), got: psi.len() });
    }
    if fs.len() != m1 + 1 {
        return Err(Error::ArityMismatch { expected: m1 + 1, got: fs.len() });
    }
    let field = fs[0].field().clone();
    let gs = character_functions(&field, psi);
    let (lhs, rhs) = match rewrite {
        Rewrite::AbsorbIntoFirst => {
            let lhs = lambda_raw(&field, &system.p, fs, &system.q, &gs)?;
            let ps: Vec<IntPoly> = system.all().cloned().collect();
            let mut new_fs = vec![conj_product(&field, &fs[0], psi)];
            new_fs.extend(fs[1..].iter().cloned());
            new_fs.extend(gs.iter().cloned());
            (lhs, lambda_raw(&field, &ps, &new_fs, &[], &[])?)
        }
        Rewrite::AbsorbIntoLast => {
            let lhs = lambda_raw(&field, &system.p, fs, &system.q, &gs)?;
            let last = &system.p[m1 - 1];
            let mut ps = system.p.clone();
            ps.extend(system.q.iter().map(|qj| qj + last));
            let mut new_fs = fs.to_vec();
            new_fs[m1] = conj_product(&field, &fs[m1], psi);
            new_fs.extend(gs.iter().cloned());
            (lhs, lambda_raw(&field, &ps, &new_fs, &[], &[])?)
        }
        Rewrite::Shift { k } => {
            if k == 0 || k > m1 {
                return Err(Error::IndexOutOfRange { index: k, lo: 1, hi: m1 });
            }
            let lhs = lambda_raw(&field, &system.p, fs, &system.q, &gs)?;
            let pk = &system.p[k - 1];
            let mut ps = vec![-pk];
            let mut new_fs = vec![fs[k].clone(), fs[0].clone()];
            for i in (1..=m1).filter(|&i| i != k) {
                ps.push(&system.p[i - 1] - pk);
                new_fs.push(fs[i].clone());
            }
            (lhs, lambda_raw(&field, &ps, &new_fs, &system.q, &gs)?)
        }
        Rewrite::FourierShift { k, phi } => {
            if k == 0 || k > m1 {
                return Err(Error::IndexOutOfRange { index: k, lo: 1, hi: m1 });
            }
            if phi >= field.q() {
                return Err(Error::IndexOutOfRange { index: phi, lo: 0, hi: field.q() - 1 });
            }
            let mut lhs_fs = fs.to_vec();
            lhs_fs[0] = DenseFunction::character(&field, phi).conj();
            let lhs = lambda_raw(&field, &system.p, &lhs_fs, &system.q, &gs)?;
            let pk = &system.p[k - 1];
            let mut ps = vec![];
            let mut new_fs = vec![lhs_fs[0].mul(&fs[k])?];
            for i in (1..=m1).filter(|&i| i != k) {
                ps.push(&system.p[i - 1] - pk);
                new_fs.push(fs[i].clone());
            }
            let mut qs = system.q.clone();
            qs.push(pk.clone());
            let mut new_gs = gs.clone();
            new_gs.push(DenseFunction::character(&field, phi));
            (lhs, lambda_raw(&field, &ps, &new_fs, &qs, &new_gs)?)
        }
    };
    Ok(RewriteReport { rewrite, lhs, rhs, max_abs_diff: (lhs - rhs).norm() })
}

/// `k = 0` absorbs the twisting characters (both ways; the worse difference
/// is reported), `1 <= k <= m1` substitutes `x -> x - P_k(y)`.
pub fn twist_rewrite_check(system: &PolySystem, fs: &[DenseFunction], psi: &[usize], k: usize) -> Result<RewriteReport> {
    match k {
        0 => {
            let first = rewrite_check(system, fs, psi, Rewrite::AbsorbIntoFirst)?;
            let last = rewrite_check(system, fs, psi, Rewrite::AbsorbIntoLast)?;
            Ok(if last.max_abs_diff > first.max_abs_diff { last } else { first })
        }
        k if k <= system.m1() => rewrite_check(system, fs, psi, Rewrite::Shift { k }),
        k => Err(Error::IndexOutOfRange { index: k, lo: 0, hi: system.m1() }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseCaseReport {
    pub value: Complex64,
    pub main: Complex64,
    pub error: Complex64,
    /// `|error| * q^{1/2}`.
    pub scaled_error: f64,
}

/// `Lambda^Q_{P_1}(f_0, f_1; psi)` against `1_{psi = 1} E f_0 E f_1`.
pub fn base_case_report(p1: &IntPoly, qs: &[IntPoly], f0: &DenseFunction, f1: &DenseFunction, psi: &[usize]) -> Result<BaseCaseReport> {
    let certified = ProgressionSystem::new(vec![p1.clone()], qs.to_vec())?;
    let field = f0.field().clone();
    threshold_flag(certified.polys(), field.p());
    let gs = character_functions(&field, psi);
    let value = lambda_average(certified.polys(), &[f0.clone(), f1.clone()], &gs)?;
    let main = if psi.iter().all(|&a| a == 0) { f0.mean() * f1.mean() } else { Complex64::new(0.0, 0.0) };
    let error = value - main;
    Ok(BaseCaseReport { value, main, error, scaled_error: error.norm() * (field.q() as f64).sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeilReport {
    pub value: Complex64,
    /// Degree of `sum_i a_i P_i` over `F_q`; 0 when every character is trivial.
    pub degree: usize,
    pub bound: f64,
    pub within_bound: bool,
    pub trivial: bool,
}

/// `E_y prod_i psi_{a_i}(P_i(y))` with the Weil bound `(d - 1) q^{-1/2}`.
pub fn weil_sum(field: &Field, polys: &[IntPoly], chars: &[usize]) -> Result<WeilReport> {
    if polys.len() != chars.len() {
        return Err(Error::ArityMismatch { expected: polys.len(), got: chars.len() });
    }
    if let Some(&a) = chars.iter().find(|&&a| a >= field.q()) {
        return Err(Error::IndexOutOfRange { index: a, lo: 0, hi: field.q() - 1 });
    }
    let q = field.q();
    if chars.iter().all(|&a| a == 0) {
        return Ok(WeilReport { value: Complex64::new(1.0, 0.0), degree: 0, bound: 0.0, within_bound: true, trivial: true });
    }
    let max_deg = polys.iter().filter_map(IntPoly::degree).max().unwrap_or(0);
    let mut combined = vec![0usize; max_deg + 1];
    for (poly, &a) in polys.iter().zip(chars) {
        for (j, &c) in poly.reduce_mod(field.p()).iter().enumerate() {
            combined[j] = field.add_idx(combined[j], field.mul_idx(a, c as usize));
        }
    }
    let degree = (1..=max_deg).rev().find(|&j| combined[j] != 0).unwrap_or(0);
    if degree == 0 {
        return Err(Error::DegenerateCombination { p: field.p() });
    }
    if degree as u64 >= field.p() {
        return Err(Error::ThresholdViolation { p: field.p(), threshold: format!("characteristic must exceed degree {degree}") });
    }
    let tables: Vec<Vec<usize>> = polys.iter().map(|p| p.value_table(field)).collect();
    let p = field.p() as usize;
    let terms = par::map_range(q, |y| {
        let e = tables.iter().zip(chars).map(|(t, &a)| field.char_exponent(a, t[y])).sum::<usize>() % p;
        field.root_of_unity(e)
    });
    let value = par::pairwise_sum(&terms) / q as f64;
    let bound = (degree as f64 - 1.0) / (q as f64).sqrt();
    Ok(WeilReport { value, degree, bound, within_bound: value.norm() <= bound + 1e-12, trivial: false })
}
