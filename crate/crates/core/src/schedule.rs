//! The delta-schedule for the U^s to U^1 descent, the decomposition budget
//! condition, the per-level bound recursion and the exact sign checks of the
//! five error exponents.
//!
//! Exponents are dyadic multiples of `gamma beta` and `gamma beta^2` and are
//! kept as exact rationals; powers of `q` are evaluated in floating point only
//! for reporting.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type Rational = BigRational;

/// `2^e` for any integer `e`.
pub fn pow2(e: i64) -> Rational {
    let m = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(m)
    } else {
        Rational::new(BigInt::one(), m)
    }
}

pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::InvalidRange(format!("{x} is not a finite number")))
}

fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `q^e` for an exact exponent.
pub fn q_pow(q: f64, e: &Rational) -> f64 {
    (q.ln() * to_f64(e)).exp()
}

/// An exact value with its floating approximation, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exact {
    pub exact: String,
    pub approx: f64,
}

impl From<&Rational> for Exact {
    fn from(x: &Rational) -> Self {
        Exact { exact: x.to_string(), approx: to_f64(x) }
    }
}

/// The four deltas used at one level of the descent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelDeltas {
    pub d1: Rational,
    pub d2: Rational,
    pub d3: Rational,
    pub d4: Rational,
}

impl LevelDeltas {
    pub fn as_f64(&self) -> [f64; 4] {
        [to_f64(&self.d1), to_f64(&self.d2), to_f64(&self.d3), to_f64(&self.d4)]
    }

    /// `d2 < d3` and `d4 < d1`, all positive.
    pub fn is_ordered(&self) -> bool {
        let zero = Rational::zero();
        [&self.d1, &self.d2, &self.d3, &self.d4].iter().all(|d| **d > zero) && self.d2 < self.d3 && self.d4 < self.d1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleParams {
    pub s: u32,
    pub beta: Rational,
    pub gamma: Rational,
    /// Entry `ell - 2` holds the deltas for level `ell`, `2 <= ell <= s`.
    pub levels: Vec<LevelDeltas>,
}

impl ScheduleParams {
    pub fn level(&self, ell: u32) -> Result<&LevelDeltas> {
        if ell < 2 || ell > self.s {
            return Err(Error::IndexOutOfRange { index: ell as usize, lo: 2, hi: self.s as usize });
        }
        Ok(&self.levels[(ell - 2) as usize])
    }

    pub fn deltas_json(&self) -> BTreeMap<String, BTreeMap<String, Exact>> {
        (2..=self.s)
            .map(|ell| {
                let d = &self.levels[(ell - 2) as usize];
                let entry = [("delta1", &d.d1), ("delta2", &d.d2), ("delta3", &d.d3), ("delta4", &d.d4)]
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), Exact::from(v)))
                    .collect();
                (ell.to_string(), entry)
            })
            .collect()
    }
}

/// The explicit choice
/// `d1 = 2^{1-2s l} g b`, `d2 = 2^{2l-4s^2} g b^2`, `d3 = 2^{1+2l-4s^2} g b^2`,
/// `d4 = 2^{-2s l} g b` for every level `l` in `2..=s`.
pub fn delta_schedule(s: u32, beta: &Rational, gamma: &Rational) -> Result<ScheduleParams> {
    if s < 2 {
        return Err(Error::InvalidRange(format!("s = {s} must be at least 2")));
    }
    if !(beta.is_positive() && *beta <= Rational::one()) {
        return Err(Error::InvalidRange(format!("beta = {beta} must lie in (0, 1]")));
    }
    if !gamma.is_positive() {
        return Err(Error::InvalidRange(format!("gamma = {gamma} must be positive")));
    }
    let (si, gb, gb2) = (i64::from(s), gamma * beta, gamma * beta * beta);
    let levels = (2..=si)
        .map(|l| LevelDeltas {
            d1: pow2(1 - 2 * si * l) * &gb,
            d2: pow2(2 * l - 4 * si * si) * &gb2,
            d3: pow2(1 + 2 * l - 4 * si * si) * &gb2,
            d4: pow2(-2 * si * l) * &gb,
        })
        .collect();
    Ok(ScheduleParams { s, beta: beta.clone(), gamma: gamma.clone(), levels })
}

pub fn delta_schedule_f64(s: u32, beta: f64, gamma: f64) -> Result<ScheduleParams> {
    delta_schedule(s, &rational_from_f64(beta)?, &rational_from_f64(gamma)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetCheck {
    pub lhs: f64,
    pub ok: bool,
}

/// `q^{d2-d3} + q^{d4-d1} <= 1/2`.
pub fn budget_condition(deltas: &LevelDeltas, q: f64) -> Result<BudgetCheck> {
    if !(q > 1.0) {
        return Err(Error::InvalidRange(format!("q = {q} must exceed 1")));
    }
    let lhs = q_pow(q, &(&deltas.d2 - &deltas.d3)) + q_pow(q, &(&deltas.d4 - &deltas.d1));
    Ok(BudgetCheck { lhs, ok: lhs <= 0.5 })
}

/// The bound `b1 min_i ||f_i||_{U^ell}^{b2} + b3` at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub ell: u32,
    pub b1: f64,
    #[serde(with = "rational_exact")]
    pub b2: Rational,
    pub b3: f64,
    pub q: f64,
}

impl BoundState {
    /// `b1 = 1`, `b2 = beta`, `b3 = q^{-beta}` at the top level.
    pub fn initial(params: &ScheduleParams, q: f64) -> Self {
        BoundState { ell: params.s, b1: 1.0, b2: params.beta.clone(), b3: q_pow(q, &-&params.beta), q }
    }
}

mod rational_exact {
    use super::{Exact, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        Exact::from(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        Exact::deserialize(d)?.exact.parse().map_err(serde::de::Error::custom)
    }
}

/// One descent step from level `ell` to `ell - 1`, implied constants set to 1:
///
/// `b1' = 2 q^{d1}`, `b2' = 2^{1-ell}`,
/// `b3' = q^{(1-b2) d3 - b2 d4} b1 + q^{-d2} + q^{d1} (c2 / q^{g'})^{2^{2-2 ell}} + q^{d3} b3`.
fn descend(state: &BoundState, d: &LevelDeltas, gamma_prime: f64, c2_prime: f64) -> BoundState {
    let q = state.q;
    let ell = state.ell;
    let one = Rational::one();
    let first = q_pow(q, &((&one - &state.b2) * &d.d3 - &state.b2 * &d.d4)) * state.b1;
    let second = q_pow(q, &-&d.d2);
    let lower = if gamma_prime.is_infinite() {
        0.0
    } else {
        let scale = 2f64.powi(2 - 2 * ell as i32);
        q_pow(q, &d.d1) * ((c2_prime.ln() - gamma_prime * q.ln()) * scale).exp()
    };
    let last = q_pow(q, &d.d3) * state.b3;
    BoundState { ell: ell - 1, b1: 2.0 * q_pow(q, &d.d1), b2: pow2(1 - i64::from(ell)), b3: first + second + lower + last, q }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalBound {
    /// `2 q^{d1}` at level 2.
    pub coeff: f64,
    pub u1_exponent: f64,
    pub b3_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<BoundState>,
    pub final_bound: FinalBound,
    /// Unspecified implied constants were replaced by 1.
    pub constants_dropped: bool,
}

/// Runs the descent from `ell = s` down to `ell = 1`.
pub fn bound_recursion(params: &ScheduleParams, init: &BoundState, gamma_prime: f64, c2_prime: f64) -> Result<Trajectory> {
    if init.ell != params.s {
        return Err(Error::InvalidInit(format!("initial level {} differs from s = {}", init.ell, params.s)));
    }
    if init.b1 != 1.0 || init.b2 != params.beta {
        return Err(Error::InvalidInit(format!("expected b1 = 1 and b2 = beta = {}", params.beta)));
    }
    if !(init.q > 1.0) || init.b3 < 0.0 {
        return Err(Error::InvalidInit("q must exceed 1 and b3 must be nonnegative".into()));
    }
    let mut states = vec![init.clone()];
    for ell in (2..=params.s).rev() {
        let next = descend(states.last().expect("nonempty"), params.level(ell)?, gamma_prime, c2_prime);
        states.push(next);
    }
    let last = states.last().expect("nonempty");
    let final_bound = FinalBound { coeff: last.b1, u1_exponent: to_f64(&last.b2), b3_final: last.b3 };
    Ok(Trajectory { states, final_bound, constants_dropped: true })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentEntry {
    pub family: u8,
    /// `None` for the single-member families.
    pub j: Option<u32>,
    pub value: Exact,
    pub ceiling: Exact,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub entries: Vec<ExponentEntry>,
    pub all_hold: bool,
}

/// The five families of error exponents in the unrolled bound for `b3` at
/// level 1, each compared exactly against its negative ceiling.
pub fn exponent_negativity(params: &ScheduleParams) -> Result<ExponentReport> {
    let s = params.s;
    let si = i64::from(s);
    let (b, g) = (&params.beta, &params.gamma);
    let one = Rational::one();
    let d = |k: u8, ell: u32| -> Result<Rational> {
        let l = params.level(ell)?;
        Ok(match k {
            1 => l.d1.clone(),
            2 => l.d2.clone(),
            3 => l.d3.clone(),
            _ => l.d4.clone(),
        })
    };
    // sum_{i=from}^{s-2} d3^{(s-i)}
    let tail = |from: u32| -> Result<Rational> {
        let mut acc = Rational::zero();
        for i in from..=s - 2 {
            acc += d(3, s - i)?;
        }
        Ok(acc)
    };
    let mut entries = vec![];
    let mut push = |family: u8, j: Option<u32>, value: Rational, ceiling: Rational| {
        let holds = value < ceiling;
        entries.push(ExponentEntry { family, j, value: Exact::from(&value), ceiling: Exact::from(&ceiling), holds });
    };

    push(1, None, -b + tail(0)?, -(b * (&one - pow2(-10))));

    let e2 = (&one - b) * d(3, s)? - b * d(4, s)? + tail(1)?;
    push(2, None, e2, -(g * b * b * pow2(-2 * si * si) * (&one - pow2(-3))));

    for j in 1..=s.saturating_sub(2) {
        let top = s - j + 1;
        let w = pow2(1 - i64::from(top));
        let e3 = d(1, top)? + (&one - &w) * d(3, s - j)? - &w * d(4, s - j)? + tail(j + 1)?;
        push(3, Some(j), e3, -(g * b * pow2(-2 * si * si)));
    }

    let third = Rational::new(BigInt::from(1), BigInt::from(3));
    for j in 0..=s - 2 {
        let e4 = -d(2, s - j)? + tail(j + 1)?;
        push(4, Some(j), e4, -(g * b * b * pow2(-4 * si * si + 4) * &third));
    }

    for j in 0..=s - 2 {
        let e5 = d(1, s - j)? - pow2(2 - 2 * i64::from(s - j)) * g + tail(j + 1)?;
        push(5, Some(j), e5, -(g * pow2(2 - 2 * si) * (&one - pow2(-4))));
    }

    let all_hold = entries.iter().all(|e| e.holds);
    Ok(ExponentReport { entries, all_hold })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub holds: bool,
}

/// Constraints on a single-level tuple `(d1, d2, d3, d4)` used by the
/// two-step worked example: `d2 < d3`, `d4 < d1`, `d1 < 1/4`,
/// `3 d3 / 4 < d4 / 4` and `d3 < 1/4`.
pub fn worked_example_constraints(d: &LevelDeltas) -> Vec<Constraint> {
    let quarter = pow2(-2);
    let three = Rational::from_integer(BigInt::from(3));
    [
        ("delta2 < delta3", d.d2 < d.d3),
        ("delta4 < delta1", d.d4 < d.d1),
        ("delta1 < 1/4", d.d1 < quarter),
        ("3 delta3 / 4 < delta4 / 4", &three * &d.d3 * &quarter < &d.d4 * &quarter),
        ("delta3 < 1/4", d.d3 < quarter),
    ]
    .into_iter()
    .map(|(name, holds)| Constraint { name: name.to_string(), holds })
    .collect()
}

/// `{s, beta, gamma, deltas, exponents, final_bound}` for the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub s: u32,
    pub beta: Exact,
    pub gamma: Exact,
    pub q: f64,
    pub deltas: BTreeMap<String, BTreeMap<String, Exact>>,
    pub budget: BTreeMap<String, BudgetCheck>,
    pub exponents: Vec<ExponentEntry>,
    pub exponents_negative: bool,
    pub trajectory: Vec<BoundState>,
    pub final_bound: FinalBound,
    pub constants_dropped: bool,
}

pub fn schedule_report(s: u32, beta: f64, gamma: f64, q: f64, gamma_prime: Option<f64>, c2_prime: f64) -> Result<ScheduleReport> {
    let params = delta_schedule_f64(s, beta, gamma)?;
    let exps = exponent_negativity(&params)?;
    let init = BoundState::initial(&params, q);
    let traj = bound_recursion(&params, &init, gamma_prime.unwrap_or(gamma), c2_prime)?;
    let budget = (2..=s)
        .map(|ell| Ok((ell.to_string(), budget_condition(params.level(ell)?, q)?)))
        .collect::<Result<_>>()?;
    Ok(ScheduleReport {
        s,
        beta: Exact::from(&params.beta),
        gamma: Exact::from(&params.gamma),
        q,
        deltas: params.deltas_json(),
        budget,
        exponents: exps.entries,
        exponents_negative: exps.all_hold,
        trajectory: traj.states,
        final_bound: traj.final_bound,
        constants_dropped: traj.constants_dropped,
    })
}
