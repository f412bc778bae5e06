//! Three-part decompositions `f = fa + fb + fc` with a structured part of
//! small dual norm, a part small in `L^1`, and a bounded part of small
//! Gowers norm. A verifier for arbitrary decompositions and a producer for
//! the U^2 norm by Fourier thresholding.

use crate::error::{Error, Result};
use crate::func::{fourier_transform, inverse_fourier, lp_norm, DenseFunction, Exponent, FourierCoefficients};
use crate::gowers::{gowers_norm, gowers_u2_via_fourier, u2_dual_upper_bound};
use crate::par;
use crate::schedule::ScheduleParams;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

const SUM_TOL: f64 = 1e-10;
const L2_TOL: f64 = 1e-12;

/// Targets `||fa||* <= q^{d1}`, `||fb||_1 <= q^{-d2}`, `||fc||_inf <= q^{d3}`,
/// `||fc||_{U^s} <= q^{-d4}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionBudget {
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub delta4: f64,
    pub s: u32,
}

impl DecompositionBudget {
    pub fn new(delta1: f64, delta2: f64, delta3: f64, delta4: f64, s: u32) -> Result<Self> {
        if [delta1, delta2, delta3, delta4].iter().any(|d| !(*d > 0.0)) {
            return Err(Error::InvalidRange("every delta must be positive".into()));
        }
        if s < 2 {
            return Err(Error::InvalidRange(format!("s = {s} must be at least 2")));
        }
        Ok(DecompositionBudget { delta1, delta2, delta3, delta4, s })
    }

    /// `q^{d2-d3} + q^{d4-d1}`.
    pub fn condition_lhs(&self, q: f64) -> f64 {
        q.powf(self.delta2 - self.delta3) + q.powf(self.delta4 - self.delta1)
    }
}

/// The level-`ell` deltas of a schedule, with `s = ell`.
pub fn decomposition_budget_from_schedule(params: &ScheduleParams, ell: u32) -> Result<DecompositionBudget> {
    let d = params.level(ell)?;
    let f = |x: &num_rational::BigRational| x.to_f64().unwrap_or(f64::NAN);
    DecompositionBudget::new(f(&d.d1), f(&d.d2), f(&d.d3), f(&d.d4), ell)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Certified,
    /// Every check passed except that no dual bound was available.
    Partial,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub dual_bound_used: Option<f64>,
    pub l1_fb: f64,
    pub linf_fc: f64,
    pub norm_fc: f64,
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub fa: DenseFunction,
    pub fb: DenseFunction,
    pub fc: DenseFunction,
    pub certs: Certificates,
    pub status: Status,
    pub diagnostics: Vec<String>,
    /// Threshold used by the producer.
    pub tau: Option<f64>,
}

/// Serializable summary without the function values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub status: Status,
    pub certs: Certificates,
    pub tau: Option<f64>,
    pub diagnostics: Vec<String>,
    pub targets: Certificates,
}

impl DecompositionResult {
    pub fn summary(&self, budget: &DecompositionBudget, q: f64) -> DecompositionSummary {
        DecompositionSummary {
            status: self.status,
            certs: self.certs,
            tau: self.tau,
            diagnostics: self.diagnostics.clone(),
            targets: Certificates {
                dual_bound_used: Some(q.powf(budget.delta1)),
                l1_fb: q.powf(-budget.delta2),
                linf_fc: q.powf(budget.delta3),
                norm_fc: q.powf(-budget.delta4),
            },
        }
    }
}

/// Checks the sum identity and the four budget bounds with sound
/// certificates. For `s = 2` the dual norm of `fa` is bounded by
/// `sum |fa^|`; otherwise `dual_bound` must be supplied by the caller.
pub fn verify_decomposition(
    f: &DenseFunction,
    fa: &DenseFunction,
    fb: &DenseFunction,
    fc: &DenseFunction,
    budget: &DecompositionBudget,
    q: f64,
    dual_bound: Option<f64>,
) -> Result<DecompositionResult> {
    for part in [fa, fb, fc] {
        if part.field() != f.field() {
            return Err(Error::ShapeMismatch("all parts must live on the same field".into()));
        }
    }
    let mut diagnostics = vec![];
    let l2 = lp_norm(f, Exponent::Finite(2.0))?;
    if l2 > 1.0 + L2_TOL {
        diagnostics.push(format!("||f||_2 = {l2} exceeds 1"));
    }
    if budget.condition_lhs(q) > 0.5 {
        log::debug!("budget condition fails at q = {q}: lhs = {}", budget.condition_lhs(q));
    }
    let sum_err = fa.add(fb)?.add(fc)?.max_abs_diff(f)?;
    if sum_err > SUM_TOL {
        diagnostics.push(format!("sum identity violated by {sum_err:e}"));
    }
    let l1_fb = lp_norm(fb, Exponent::Finite(1.0))?;
    let linf_fc = lp_norm(fc, Exponent::Infinity)?;
    let norm_fc = if budget.s == 2 { gowers_u2_via_fourier(fc).value } else { gowers_norm(fc, budget.s)?.value };
    let dual = if budget.s == 2 { Some(u2_dual_upper_bound(fa)) } else { dual_bound };
    if l1_fb > q.powf(-budget.delta2) {
        diagnostics.push(format!("||fb||_1 = {l1_fb} exceeds q^-delta2"));
    }
    if linf_fc > q.powf(budget.delta3) {
        diagnostics.push(format!("||fc||_inf = {linf_fc} exceeds q^delta3"));
    }
    if norm_fc > q.powf(-budget.delta4) {
        diagnostics.push(format!("||fc||_U{} = {norm_fc} exceeds q^-delta4", budget.s));
    }
    if let Some(d) = dual {
        if d > q.powf(budget.delta1) {
            diagnostics.push(format!("dual bound {d} exceeds q^delta1"));
        }
    }
    let status = match (diagnostics.is_empty(), dual.is_some()) {
        (false, _) => Status::Failed,
        (true, false) => Status::Partial,
        (true, true) => Status::Certified,
    };
    Ok(DecompositionResult {
        fa: fa.clone(),
        fb: fb.clone(),
        fc: fc.clone(),
        certs: Certificates { dual_bound_used: dual, l1_fb, linf_fc, norm_fc },
        status,
        diagnostics,
        tau: None,
    })
}

/// Dyadic thresholds `1, 1/2, ..` down to `1/q`.
pub fn tau_candidates(q: usize) -> Vec<f64> {
    let n = (q as f64).log2().floor() as i32;
    (0..=n).map(|i| 2f64.powi(-i)).collect()
}

/// Splits `f` at threshold `tau`: `fa` keeps the characters with `|f^| >= tau`.
pub fn threshold_split(f: &DenseFunction, spectrum: &FourierCoefficients, tau: f64) -> Result<(DenseFunction, DenseFunction)> {
    let zero = Complex64::new(0.0, 0.0);
    let kept: Vec<Complex64> = spectrum.coeffs().iter().map(|&c| if c.norm() >= tau { c } else { zero }).collect();
    let fa = inverse_fourier(&FourierCoefficients::new(f.field().clone(), kept)?);
    let fc = f.sub(&fa)?;
    Ok((fa, fc))
}

/// Every candidate of the sweep, verified, in sweep order.
pub fn u2_threshold_sweep(f: &DenseFunction, budget: &DecompositionBudget, q: f64) -> Result<Vec<DecompositionResult>> {
    let l2 = lp_norm(f, Exponent::Finite(2.0))?;
    if l2 > 1.0 + L2_TOL {
        return Err(Error::NotL2Normalized(l2));
    }
    if budget.s != 2 {
        return Err(Error::InvalidRange(format!("the threshold producer needs s = 2, got {}", budget.s)));
    }
    if budget.condition_lhs(q) > 0.5 {
        log::debug!("budget condition fails at q = {q}: lhs = {}", budget.condition_lhs(q));
    }
    let spectrum = fourier_transform(f);
    let fb = DenseFunction::zero(f.field());
    let taus = tau_candidates(f.q());
    let results = par::map_slice(&taus, |&tau| {
        let (fa, fc) = threshold_split(f, &spectrum, tau)?;
        let mut r = verify_decomposition(f, &fa, &fb, &fc, budget, q, None)?;
        r.tau = Some(tau);
        Ok(r)
    });
    results.into_iter().collect()
}

/// The first (largest) threshold whose decomposition certifies. When none
/// does, the candidate with the fewest violated bounds is returned.
pub fn u2_threshold_decompose(f: &DenseFunction, budget: &DecompositionBudget, q: f64) -> Result<DecompositionResult> {
    let sweep = u2_threshold_sweep(f, budget, q)?;
    if let Some(i) = sweep.iter().position(|r| r.status == Status::Certified) {
        return Ok(sweep.into_iter().nth(i).expect("index from position"));
    }
    let best = sweep
        .iter()
        .enumerate()
        .min_by_key(|(i, r)| (r.diagnostics.len(), *i))
        .map(|(i, _)| i)
        .ok_or(Error::EmptyInput)?;
    Ok(sweep.into_iter().nth(best).expect("index from min"))
}
