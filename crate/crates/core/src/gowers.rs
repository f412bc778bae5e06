//! Gowers uniformity norms, the U^2 Fourier identity, a certified U^2 dual
//! bound and the two-variable Cauchy-Schwarz projection.

use crate::error::{Error, Result};
use crate::func::{delta_first_var_idx, fourier_transform, inner, DenseFunction, TwoVarFunction};
use crate::par;
use crate::rng;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default ceiling on scalar operations for the exhaustive averages.
pub const DEFAULT_BUDGET: f64 = 1e9;

const IMAG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GowersNormValue {
    pub s: u32,
    pub value: f64,
    /// `value^(2^s)` before taking the root.
    pub raw_power: f64,
}

impl GowersNormValue {
    fn from_raw(s: u32, raw_power: f64) -> Self {
        GowersNormValue { s, value: raw_power.max(0.0).powf(1.0 / f64::from(1u32 << s)), raw_power }
    }
}

fn check_budget(cost: f64, budget: f64) -> Result<()> {
    if cost > budget {
        return Err(Error::BudgetExceeded { cost, budget });
    }
    Ok(())
}

/// Sum over `h_{j+1}..h_s` of `sum_x Delta_{h..} g(x)`, differencing in place.
fn nested_sum(field: &crate::field::FieldSpec, g: &[Complex64], depth: u32, buf: &mut Vec<Vec<Complex64>>) -> Complex64 {
    let q = g.len();
    if depth == 0 {
        return g.iter().sum();
    }
    let mut next = buf.pop().unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); q]);
    let mut acc = Complex64::new(0.0, 0.0);
    for h in 0..q {
        for x in 0..q {
            next[x] = g[field.add_idx(x, h)] * g[x].conj();
        }
        acc += nested_sum(field, &next, depth - 1, buf);
    }
    buf.push(next);
    acc
}

/// `||f||_{U^s}` by the exhaustive average over `(x, h_1..h_s)`, with the
/// differenced function cached per `h`-prefix. The outermost `h` is split
/// across threads and reduced pairwise in index order.
pub fn gowers_norm(f: &DenseFunction, s: u32) -> Result<GowersNormValue> {
    gowers_norm_with_budget(f, s, DEFAULT_BUDGET)
}

pub fn gowers_norm_with_budget(f: &DenseFunction, s: u32, budget: f64) -> Result<GowersNormValue> {
    if s == 0 {
        return Err(Error::InvalidRange("s must be at least 1".into()));
    }
    let q = f.q();
    check_budget((q as f64).powi(s as i32 + 1), budget)?;
    let field = f.field().clone();
    let g = f.values();
    let partial = par::map_range(q, |h| {
        let first: Vec<Complex64> = (0..q).map(|x| g[field.add_idx(x, h)] * g[x].conj()).collect();
        nested_sum(&field, &first, s - 1, &mut Vec::new())
    });
    let total = par::pairwise_sum(&partial) / (q as f64).powi(s as i32 + 1);
    if total.im.abs() > IMAG_TOL {
        log::warn!("Gowers average has imaginary part {:e}", total.im);
    }
    Ok(GowersNormValue::from_raw(s, total.re))
}

/// `||f||_{U^2}^4 = sum_a |f^(a)|^4`.
pub fn gowers_u2_via_fourier(f: &DenseFunction) -> GowersNormValue {
    GowersNormValue::from_raw(2, fourier_transform(f).lp_sum(4.0))
}

/// `sum_a |f^(a)|`, which bounds `|<f, g>| / ||g||_{U^2}` for every `g`
/// because `|g^(a)| <= ||g^||_4 = ||g||_{U^2}`.
pub fn u2_dual_upper_bound(f: &DenseFunction) -> f64 {
    fourier_transform(f).lp_sum(1.0)
}

/// Largest `|<f, g>| / ||g||_{U^2}` over every character and `samples`
/// random 1-bounded `g`. A lower bound for the U^2 dual norm.
pub fn dual_pairing_search(f: &DenseFunction, samples: usize, seed: u64) -> Result<f64> {
    let field = f.field().clone();
    let spectrum = fourier_transform(f);
    let best_char = spectrum.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let ratios = par::map_range(samples, |i| {
        let mut r = rng::seeded(rng::derive_seed(seed, i as u64));
        let g = DenseFunction::new(field.clone(), (0..field.q()).map(|_| rng::unit_disk(&mut r)).collect())?;
        let norm = gowers_u2_via_fourier(&g).value;
        if norm == 0.0 {
            return Ok(0.0);
        }
        Ok(inner(f, &g)?.norm() / norm)
    });
    ratios.into_iter().try_fold(best_char, |m, r: Result<f64>| Ok(m.max(r?)))
}

/// `F_{h_1..h_t}(x) = E_y prod_i Delta^{(1)}_{h_1..h_t} f_i(x, y)`.
pub fn cs_project(fs: &[TwoVarFunction], hs: &[usize]) -> Result<DenseFunction> {
    let first = fs.first().ok_or(Error::EmptyInput)?;
    let field = first.field().clone();
    for f in fs {
        if f.field() != &field {
            return Err(Error::FieldMismatch);
        }
        if !f.is_one_bounded() {
            let sup = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            return Err(Error::NotOneBounded(sup));
        }
    }
    let q = field.q();
    let differenced: Vec<TwoVarFunction> = fs.iter().map(|f| delta_first_var_idx(f, hs)).collect();
    let values = par::map_range(q, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for y in 0..q {
            acc += differenced.iter().map(|d| d.at(x, y)).product::<Complex64>();
        }
        acc / q as f64
    });
    DenseFunction::new(field, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsReport {
    pub s: u32,
    /// `||F||_{U^s}^{2^{2s-2}}`.
    pub lhs: f64,
    /// `E_{h_1..h_{s-2}} ||F_{h}||_{U^2}^4`.
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `||F||_{U^s}^{2^{2s-2}}` with the averaged U^2 norms of the
/// `(s-2)`-fold differenced projections.
pub fn check_cs_inequality(fs: &[TwoVarFunction], s: u32) -> Result<CsReport> {
    check_cs_inequality_with_budget(fs, s, DEFAULT_BUDGET)
}

pub fn check_cs_inequality_with_budget(fs: &[TwoVarFunction], s: u32, budget: f64) -> Result<CsReport> {
    if s < 2 {
        return Err(Error::InvalidRange("s must be at least 2".into()));
    }
    let q = fs.first().ok_or(Error::EmptyInput)?.q() as f64;
    let t = s - 2;
    let per_tuple = fs.len() as f64 * f64::from(1u32 << t) * q * q + q * q;
    check_budget(q.powi(s as i32 + 1) + q.powi(t as i32) * per_tuple, budget)?;
    let big_f = cs_project(fs, &[])?;
    let lhs = gowers_norm_with_budget(&big_f, s, budget)?.raw_power.max(0.0).powi(1 << t);
    let qn = q as usize;
    let tuples = qn.pow(t);
    let terms = par::map_range(tuples, |code| {
        let mut c = code;
        let hs: Vec<usize> = (0..t)
            .map(|_| {
                let h = c % qn;
                c /= qn;
                h
            })
            .collect();
        cs_project(fs, &hs).map(|fh| gowers_u2_via_fourier(&fh).raw_power)
    });
    let terms: Vec<f64> = terms.into_iter().collect::<Result<_>>()?;
    let rhs = par::pairwise_sum_f64(&terms) / tuples as f64;
    Ok(CsReport { s, lhs, rhs, holds: lhs <= rhs + 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::func::{indicator_idx, FourierCoefficients, inverse_fourier};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constants_and_characters() {
        let f = make_field(7, 1, None).unwrap();
        for s in 1..=4 {
            let v = gowers_norm(&DenseFunction::constant(&f, c(1.0)), s).unwrap();
            assert!((v.value - 1.0).abs() < 1e-12);
        }
        let psi = DenseFunction::character(&f, 3);
        assert!((gowers_norm(&psi, 2).unwrap().value - 1.0).abs() < 1e-12);
        assert!((gowers_u2_via_fourier(&psi).value - 1.0).abs() < 1e-12);
        assert!((u2_dual_upper_bound(&psi) - 1.0).abs() < 1e-12);
        assert_eq!(u2_dual_upper_bound(&DenseFunction::zero(&f)), 0.0);
    }

    #[test]
    fn u1_is_absolute_mean() {
        let f = make_field(11, 1, None).unwrap();
        let mut r = rng::seeded(5);
        let g = DenseFunction::new(f.clone(), (0..11).map(|_| rng::unit_disk(&mut r)).collect()).unwrap();
        assert!((gowers_norm(&g, 1).unwrap().value - g.mean().norm()).abs() < 1e-10);
    }

    #[test]
    fn balanced_indicator_matches_fourier() {
        let f = make_field(7, 1, None).unwrap();
        let a = indicator_idx(&f, &[0, 1, 3]).unwrap().map(|v| v - 3.0 / 7.0);
        let naive = gowers_norm(&a, 2).unwrap();
        let four = gowers_u2_via_fourier(&a);
        assert!((naive.raw_power - four.raw_power).abs() <= 1e-8 * four.raw_power);
    }

    #[test]
    fn two_spike_spectrum() {
        let f = make_field(11, 1, None).unwrap();
        let mut co = vec![c(0.0); 11];
        co[2] = c(0.5);
        co[7] = c(0.5);
        let g = inverse_fourier(&FourierCoefficients::new(f, co).unwrap());
        assert!((gowers_u2_via_fourier(&g).raw_power - 0.125).abs() < 1e-12);
        assert!((gowers_norm(&g, 2).unwrap().raw_power - 0.125).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let f = make_field(101, 1, None).unwrap();
        let g = DenseFunction::constant(&f, c(1.0));
        assert!(matches!(gowers_norm_with_budget(&g, 3, 1e6), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn cs_projection_examples() {
        let f = make_field(7, 1, None).unwrap();
        let g: Vec<Complex64> = (0..7).map(|x| f.character_idx(1, x) * 0.9).collect();
        let big = TwoVarFunction::from_fn(&f, |x, _| g[x]);
        let proj = cs_project(&[big], &[]).unwrap();
        assert!(proj.values().iter().zip(&g).all(|(a, b)| (a - b).norm() < 1e-12));
        let ones = TwoVarFunction::from_fn(&f, |_, _| c(1.0));
        for hs in [vec![], vec![3], vec![1, 5]] {
            let p = cs_project(&[ones.clone(), ones.clone()], &hs).unwrap();
            assert!(p.values().iter().all(|v| (v - c(1.0)).norm() < 1e-12));
        }
        let big = TwoVarFunction::from_fn(&f, |_, _| c(1.5));
        assert!(matches!(cs_project(&[big], &[]), Err(Error::NotOneBounded(_))));
    }

    #[test]
    fn cs_equality_at_s2_and_constants() {
        let f = make_field(7, 1, None).unwrap();
        let mut r = rng::seeded(9);
        let fs: Vec<TwoVarFunction> = (0..2)
            .map(|_| TwoVarFunction::new(f.clone(), (0..49).map(|_| rng::unit_disk(&mut r)).collect()).unwrap())
            .collect();
        let rep = check_cs_inequality(&fs, 2).unwrap();
        assert!((rep.lhs - rep.rhs).abs() <= 1e-12);
        let ones = vec![TwoVarFunction::from_fn(&f, |_, _| c(1.0)); 2];
        for s in 2..=3 {
            let rep = check_cs_inequality(&ones, s).unwrap();
            assert!((rep.lhs - 1.0).abs() < 1e-12 && (rep.rhs - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_search_respects_certificate() {
        let f = make_field(31, 1, None).unwrap();
        let mut r = rng::seeded(77);
        let g = DenseFunction::new(f.clone(), (0..31).map(|_| rng::unit_disk(&mut r)).collect()).unwrap();
        let found = dual_pairing_search(&g, 1000, 1).unwrap();
        assert!(found <= u2_dual_upper_bound(&g) + 1e-9);
    }
}
