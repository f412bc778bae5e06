//! Exact arithmetic in `F_q`, `q = p^k`.
//!
//! Elements are coefficient vectors in the power basis `1, t, ..., t^(k-1)`
//! of a monic irreducible modulus. Every element also has an *index* in
//! `0..q`, `index = sum coeffs[i] * p^i`; enumeration, dense functions and all
//! inner loops work on indices. Index 0 is the additive identity and, for
//! `k = 1`, the index of `c` is `c` itself.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::Arc;

/// An element of `F_q` in the power basis. Always fully reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement {
    pub coeffs: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Inv,
    Pow(u64),
}

/// `F_q` with an explicit modulus and precomputed character data.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    p: u64,
    k: usize,
    /// `k + 1` coefficients, constant term first, monic.
    modulus: Vec<u64>,
    q: usize,
    /// `p^i` for `i in 0..k`.
    weights: Vec<usize>,
    /// `Tr(t^i)` for `i in 0..k`.
    basis_trace: Vec<u64>,
    /// `exp(2 pi i j / p)` for `j in 0..p`.
    roots: Vec<Complex64>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

pub type Field = Arc<FieldSpec>;

/// Builds `F_{p^k}`, choosing the canonical modulus when none is given.
pub fn make_field(p: u64, k: usize, modulus: Option<&[u64]>) -> Result<Field> {
    FieldSpec::new(p, k, modulus).map(Arc::new)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

const MAX_ORDER: u128 = 1 << 32;

impl FieldSpec {
    pub fn new(p: u64, k: usize, modulus: Option<&[u64]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::DegreeMismatch { expected: 1, got: 0 });
        }
        let q128 = (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if q128 > MAX_ORDER {
            return Err(Error::InvalidRange(format!("field order {p}^{k} is too large")));
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != k + 1 || m[k] != 1 {
                    return Err(Error::DegreeMismatch { expected: k, got: m.len() });
                }
                if let Some(&c) = m.iter().find(|&&c| c >= p) {
                    return Err(Error::ModulusOutOfRange(c));
                }
                if !poly::is_irreducible(m, p) {
                    return Err(Error::ReducibleModulus { p });
                }
                m.to_vec()
            }
            None => canonical_modulus(p, k),
        };
        let q = q128 as usize;
        let weights = (0..k).map(|i| (p as usize).pow(i as u32)).collect();
        let roots = (0..p).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / p as f64)).collect();
        let mut field = FieldSpec { p, k, modulus, q, weights, basis_trace: vec![0; k], roots };
        field.basis_trace = (0..k)
            .map(|i| {
                let mut c = vec![0; k];
                c[i] = 1;
                let t = field.frobenius_trace(&c);
                debug_assert!(t[1..].iter().all(|&x| x == 0), "trace left F_p");
                t[0]
            })
            .collect();
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.k == 1
    }

    // ---- elements ----------------------------------------------------------

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.k] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// The image of the integer `n` under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let mut coeffs = vec![0; self.k];
        coeffs[0] = n.rem_euclid(self.p as i64) as u64;
        FieldElement { coeffs }
    }

    pub fn element(&self, index: usize) -> FieldElement {
        let p = self.p as usize;
        let mut rest = index;
        let coeffs = (0..self.k)
            .map(|_| {
                let c = rest % p;
                rest /= p;
                c as u64
            })
            .collect();
        FieldElement { coeffs }
    }

    pub fn index_of(&self, a: &FieldElement) -> Result<usize> {
        self.check(a)?;
        Ok(self.index_unchecked(&a.coeffs))
    }

    fn index_unchecked(&self, coeffs: &[u64]) -> usize {
        coeffs.iter().zip(&self.weights).map(|(&c, &w)| c as usize * w).sum()
    }

    pub fn contains(&self, a: &FieldElement) -> bool {
        a.coeffs.len() == self.k && a.coeffs.iter().all(|&c| c < self.p)
    }

    fn check(&self, a: &FieldElement) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// All `q` elements in index order.
    pub fn enumerate_elements(&self) -> Vec<FieldElement> {
        (0..self.q).map(|i| self.element(i)).collect()
    }

    // ---- element arithmetic ------------------------------------------------

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| self.add_p(x, y)).collect() })
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| self.sub_p(x, y)).collect() })
    }

    pub fn neg(&self, a: &FieldElement) -> Result<FieldElement> {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement { coeffs: self.mul_coeffs(&a.coeffs, &b.coeffs) })
    }

    pub fn pow(&self, a: &FieldElement, e: u64) -> Result<FieldElement> {
        self.check(a)?;
        Ok(FieldElement { coeffs: self.pow_coeffs(&a.coeffs, e) })
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        if a.coeffs.iter().all(|&c| c == 0) {
            return Err(Error::DivisionByZero);
        }
        self.pow(a, self.q as u64 - 2)
    }

    /// Dispatches one arithmetic operation. `b` is ignored for `Inv` and `Pow`.
    pub fn field_arith(&self, op: ArithOp, a: &FieldElement, b: Option<&FieldElement>) -> Result<FieldElement> {
        let rhs = || b.ok_or(Error::FieldMismatch);
        match op {
            ArithOp::Add => self.add(a, rhs()?),
            ArithOp::Sub => self.sub(a, rhs()?),
            ArithOp::Mul => self.mul(a, rhs()?),
            ArithOp::Inv => self.inv(a),
            ArithOp::Pow(e) => self.pow(a, e),
        }
    }

    /// `Tr_{F_q/F_p}(a)` as an integer in `0..p`.
    pub fn trace(&self, a: &FieldElement) -> Result<u64> {
        self.check(a)?;
        Ok(self.trace_coeffs(&a.coeffs))
    }

    /// `psi_a(x) = exp(2 pi i Tr(a x) / p)`.
    pub fn character_eval(&self, a: &FieldElement, x: &FieldElement) -> Result<Complex64> {
        let ax = self.mul(a, x)?;
        Ok(self.roots[self.trace_coeffs(&ax.coeffs) as usize])
    }

    // ---- index arithmetic (hot paths) ---------------------------------------

    #[inline]
    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        let p = self.p as usize;
        if self.k == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        let (mut a, mut b, mut out) = (a, b, 0);
        for &w in &self.weights {
            let s = a % p + b % p;
            out += if s >= p { s - p } else { s } * w;
            a /= p;
            b /= p;
        }
        out
    }

    #[inline]
    pub fn neg_idx(&self, a: usize) -> usize {
        let p = self.p as usize;
        if self.k == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        let mut a = a;
        let mut out = 0;
        for &w in &self.weights {
            let d = a % p;
            out += if d == 0 { 0 } else { p - d } * w;
            a /= p;
        }
        out
    }

    #[inline]
    pub fn sub_idx(&self, a: usize, b: usize) -> usize {
        self.add_idx(a, self.neg_idx(b))
    }

    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        if self.k == 1 {
            return ((a as u128 * b as u128) % self.p as u128) as usize;
        }
        let ca = self.element(a).coeffs;
        let cb = self.element(b).coeffs;
        self.index_unchecked(&self.mul_coeffs(&ca, &cb))
    }

    /// Index of the image of the integer `n`.
    pub fn int_idx(&self, n: i64) -> usize {
        n.rem_euclid(self.p as i64) as usize
    }

    pub fn trace_idx(&self, a: usize) -> u64 {
        if self.k == 1 {
            return a as u64;
        }
        self.trace_coeffs(&self.element(a).coeffs)
    }

    /// `Tr(a x)`, the exponent of `psi_a(x)`.
    #[inline]
    pub fn char_exponent(&self, a: usize, x: usize) -> usize {
        if self.k == 1 {
            return ((a as u128 * x as u128) % self.p as u128) as usize;
        }
        self.trace_idx(self.mul_idx(a, x)) as usize
    }

    #[inline]
    pub fn character_idx(&self, a: usize, x: usize) -> Complex64 {
        self.roots[self.char_exponent(a, x)]
    }

    /// `exp(2 pi i j / p)`.
    #[inline]
    pub fn root_of_unity(&self, j: usize) -> Complex64 {
        self.roots[j % self.p as usize]
    }

    /// Row `x -> psi_a(x)` in index order.
    pub fn character_row(&self, a: usize) -> Vec<Complex64> {
        (0..self.q).map(|x| self.character_idx(a, x)).collect()
    }

    // ---- internals ---------------------------------------------------------

    #[inline]
    fn add_p(&self, x: u64, y: u64) -> u64 {
        ((x as u128 + y as u128) % self.p as u128) as u64
    }

    #[inline]
    fn sub_p(&self, x: u64, y: u64) -> u64 {
        ((x as u128 + self.p as u128 - y as u128) % self.p as u128) as u64
    }

    #[inline]
    fn mul_p(&self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.p as u128) as u64
    }

    fn mul_coeffs(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let k = self.k;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = self.add_p(prod[i + j], self.mul_p(x, y));
            }
        }
        // reduce by the monic modulus, top degree first
        for d in (k..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &m) in self.modulus[..k].iter().enumerate() {
                prod[d - k + i] = self.sub_p(prod[d - k + i], self.mul_p(c, m));
            }
        }
        prod.truncate(k);
        prod
    }

    fn pow_coeffs(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut base = a.to_vec();
        let mut acc = self.one().coeffs;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_coeffs(&acc, &base);
            }
            base = self.mul_coeffs(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a + a^p + ... + a^(p^(k-1))` computed by Frobenius iteration.
    fn frobenius_trace(&self, a: &[u64]) -> Vec<u64> {
        let mut term = a.to_vec();
        let mut sum = vec![0; self.k];
        for _ in 0..self.k {
            for (s, &t) in sum.iter_mut().zip(&term) {
                *s = self.add_p(*s, t);
            }
            term = self.pow_coeffs(&term, self.p);
        }
        sum
    }

    fn trace_coeffs(&self, a: &[u64]) -> u64 {
        a.iter().zip(&self.basis_trace).fold(0, |acc, (&c, &t)| self.add_p(acc, self.mul_p(c, t)))
    }
}

/// Smallest monic irreducible of degree `k`, ordering candidates by the
/// integer `sum a_i p^i` of their lower coefficients.
fn canonical_modulus(p: u64, k: usize) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1];
    }
    let count = (p as u128).pow(k as u32);
    let mut cand = vec![0u64; k + 1];
    cand[k] = 1;
    for n in 0..count {
        let mut rest = n;
        for c in cand.iter_mut().take(k) {
            *c = (rest % p as u128) as u64;
            rest /= p as u128;
        }
        if poly::is_irreducible(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

/// Dense polynomials over `F_p`, constant term first. Only what the
/// irreducibility test needs.
pub(crate) mod poly {
    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv_p(a: u64, p: u64) -> u64 {
        let mut acc = 1u128;
        let mut base = a as u128 % p as u128;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p as u128;
            }
            base = base * base % p as u128;
            e >>= 1;
        }
        acc as u64
    }

    pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let m = trim(m.to_vec());
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_p(m[dm], p) as u128;
        let p128 = p as u128;
        while r.len() > dm {
            let dr = r.len() - 1;
            let c = r[dr] as u128 * lead_inv % p128;
            for (i, &mi) in m.iter().enumerate() {
                let idx = dr - dm + i;
                r[idx] = ((r[idx] as u128 + p128 - c * mi as u128 % p128) % p128) as u64;
            }
            r = trim(r);
        }
        r
    }

    fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
            }
        }
        rem(&prod, m, p)
    }

    fn powmod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut base = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            e >>= 1;
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn sub_x(a: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        if a.len() < 2 {
            a.resize(2, 0);
        }
        a[1] = (a[1] + p - 1) % p;
        trim(a)
    }

    fn has_root(f: &[u64], p: u64) -> bool {
        (0..p).any(|x| {
            let v = f.iter().rev().fold(0u128, |acc, &c| (acc * x as u128 + c as u128) % p as u128);
            v == 0
        })
    }

    fn prime_factors(mut n: usize) -> Vec<usize> {
        let mut out = vec![];
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                out.push(d);
                while n.is_multiple_of(d) {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    /// Root test for `k <= 3`, Rabin's test otherwise.
    pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
        let f = trim(f.to_vec());
        let k = f.len().saturating_sub(1);
        match k {
            0 => false,
            1 => true,
            2 | 3 => !has_root(&f, p),
            _ => {
                let x = vec![0, 1];
                // x^(p^k) == x mod f
                let mut frob = x.clone();
                for _ in 0..k {
                    frob = powmod(&frob, p as u128, &f, p);
                }
                if !sub_x(&frob, p).is_empty() {
                    return false;
                }
                prime_factors(k).into_iter().all(|r| {
                    let mut h = x.clone();
                    for _ in 0..k / r {
                        h = powmod(&h, p as u128, &f, p);
                    }
                    let g = gcd(&f, &sub_x(&h, p), p);
                    g.len() == 1
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_fields_up_to_49() -> Vec<Field> {
        let mut v = vec![];
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            v.push(make_field(p, 1, None).unwrap());
        }
        for (p, k) in [(2u64, 2usize), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (5, 2), (7, 2)] {
            v.push(make_field(p, k, None).unwrap());
        }
        v
    }

    #[test]
    fn prime_field_construction() {
        let f = make_field(7, 1, None).unwrap();
        assert_eq!(f.q(), 7);
        assert_eq!(f.modulus(), &[0, 1]);
        assert!(f.is_prime_field());
    }

    #[test]
    fn f9_with_t2_plus_1() {
        let f = make_field(3, 2, Some(&[1, 0, 1])).unwrap();
        assert_eq!(f.q(), 9);
        // canonical choice agrees
        assert_eq!(make_field(3, 2, None).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(make_field(9, 1, None).unwrap_err(), Error::NotPrime(9));
        assert_eq!(make_field(3, 2, Some(&[2, 0, 1])).unwrap_err(), Error::ReducibleModulus { p: 3 });
        assert!(matches!(make_field(3, 2, Some(&[1, 1])), Err(Error::DegreeMismatch { .. })));
        assert!(matches!(make_field(3, 2, Some(&[1, 0, 2])), Err(Error::DegreeMismatch { .. })));
        assert!(matches!(make_field(3, 2, Some(&[5, 0, 1])), Err(Error::ModulusOutOfRange(5))));
    }

    #[test]
    fn canonical_moduli_are_irreducible_and_minimal() {
        // F_27: t^3+2t+1 is the first candidate without a root.
        assert_eq!(make_field(3, 3, None).unwrap().modulus(), &[1, 2, 0, 1]);
        // F_16 via Rabin: t^4+t+1.
        assert_eq!(make_field(2, 4, None).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        // x^4+x^2+1 = (x^2+x+1)^2 over F_2 has no root but is reducible.
        assert!(!poly::is_irreducible(&[1, 0, 1, 0, 1], 2));
    }

    #[test]
    fn inverse_in_f7() {
        let f = make_field(7, 1, None).unwrap();
        assert_eq!(f.inv(&f.from_int(3)).unwrap(), f.from_int(5));
        assert_eq!(f.inv(&f.zero()).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn t_squared_is_minus_one_in_f9() {
        let f = make_field(3, 2, Some(&[1, 0, 1])).unwrap();
        let t = FieldElement { coeffs: vec![0, 1] };
        assert_eq!(f.mul(&t, &t).unwrap(), f.from_int(2));
        assert_eq!(f.field_arith(ArithOp::Mul, &t, Some(&t)).unwrap(), f.from_int(-1));
    }

    #[test]
    fn mismatched_operands_rejected() {
        let f = make_field(3, 2, None).unwrap();
        let g = make_field(5, 1, None).unwrap();
        assert_eq!(f.add(&f.one(), &g.one()).unwrap_err(), Error::FieldMismatch);
        assert_eq!(f.trace(&FieldElement { coeffs: vec![4, 0] }).unwrap_err(), Error::FieldMismatch);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in all_fields_up_to_49() {
            let els = f.enumerate_elements();
            for a in &els {
                if *a != f.zero() {
                    assert_eq!(f.mul(a, &f.inv(a).unwrap()).unwrap(), f.one());
                }
                for b in &els {
                    assert_eq!(f.add(a, b).unwrap(), f.add(b, a).unwrap());
                    assert_eq!(f.mul(a, b).unwrap(), f.mul(b, a).unwrap());
                    let ia = f.index_of(a).unwrap();
                    let ib = f.index_of(b).unwrap();
                    assert_eq!(f.add_idx(ia, ib), f.index_of(&f.add(a, b).unwrap()).unwrap());
                    assert_eq!(f.sub_idx(ia, ib), f.index_of(&f.sub(a, b).unwrap()).unwrap());
                    assert_eq!(f.mul_idx(ia, ib), f.index_of(&f.mul(a, b).unwrap()).unwrap());
                }
            }
            // associativity and distributivity on a strided sample of triples
            let step = (els.len() / 7).max(1);
            for a in els.iter().step_by(step) {
                for b in &els {
                    for c in els.iter().step_by(step) {
                        let ab_c = f.mul(&f.mul(a, b).unwrap(), c).unwrap();
                        let a_bc = f.mul(a, &f.mul(b, c).unwrap()).unwrap();
                        assert_eq!(ab_c, a_bc);
                        let lhs = f.mul(a, &f.add(b, c).unwrap()).unwrap();
                        let rhs = f.add(&f.mul(a, b).unwrap(), &f.mul(a, c).unwrap()).unwrap();
                        assert_eq!(lhs, rhs);
                        let s1 = f.add(&f.add(a, b).unwrap(), c).unwrap();
                        let s2 = f.add(a, &f.add(b, c).unwrap()).unwrap();
                        assert_eq!(s1, s2);
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_is_a_bijection() {
        for f in all_fields_up_to_49() {
            let els = f.enumerate_elements();
            assert_eq!(els.len(), f.q());
            assert_eq!(els[0], f.zero());
            let mut sorted = els.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), f.q());
            for (i, e) in els.iter().enumerate() {
                assert_eq!(f.index_of(e).unwrap(), i);
            }
        }
        let f5 = make_field(5, 1, None).unwrap();
        let idx: Vec<u64> = f5.enumerate_elements().iter().map(|e| e.coeffs[0]).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn trace_values() {
        let f7 = make_field(7, 1, None).unwrap();
        for x in 0..7 {
            assert_eq!(f7.trace(&f7.from_int(x)).unwrap(), x as u64);
        }
        let f9 = make_field(3, 2, Some(&[1, 0, 1])).unwrap();
        assert_eq!(f9.trace(&FieldElement { coeffs: vec![0, 1] }).unwrap(), 0);
        assert_eq!(f9.trace(&f9.zero()).unwrap(), 0);
        // Tr(1) = k mod p
        assert_eq!(f9.trace(&f9.one()).unwrap(), 2);
    }

    #[test]
    fn trace_is_fp_linear_exhaustive() {
        for f in all_fields_up_to_49() {
            let p = f.p();
            for a in 0..f.q() {
                for b in 0..f.q() {
                    for c in 0..p {
                        let ca = f.mul_idx(c as usize, a);
                        let lhs = f.trace_idx(f.add_idx(ca, b));
                        let rhs = (c * f.trace_idx(a) + f.trace_idx(b)) % p;
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_trace_agrees_with_basis_trace() {
        for f in all_fields_up_to_49() {
            for a in f.enumerate_elements() {
                let direct = f.frobenius_trace(&a.coeffs);
                assert!(direct[1..].iter().all(|&c| c == 0));
                assert_eq!(direct[0], f.trace(&a).unwrap());
            }
        }
    }

    #[test]
    fn character_values() {
        let f7 = make_field(7, 1, None).unwrap();
        let v = f7.character_eval(&f7.one(), &f7.from_int(3)).unwrap();
        let expect = Complex64::from_polar(1.0, 6.0 * std::f64::consts::PI / 7.0);
        assert!((v - expect).norm() < 1e-15);
        for x in 0..7 {
            assert_eq!(f7.character_eval(&f7.zero(), &f7.from_int(x)).unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn characters_are_homomorphisms() {
        for f in all_fields_up_to_49() {
            for a in (0..f.q()).step_by(3) {
                for x in 0..f.q() {
                    for y in (0..f.q()).step_by(2) {
                        let lhs = f.character_idx(a, f.add_idx(x, y));
                        let rhs = f.character_idx(a, x) * f.character_idx(a, y);
                        assert!((lhs - rhs).norm() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn character_orthogonality() {
        for f in all_fields_up_to_49() {
            let q = f.q();
            for a in 0..q {
                for b in 0..q {
                    let s: Complex64 = (0..q).map(|x| f.character_idx(a, x) * f.character_idx(b, x).conj()).sum();
                    let expect = if a == b { q as f64 } else { 0.0 };
                    assert!((s - expect).norm() <= 1e-9, "q={q} a={a} b={b} s={s}");
                }
            }
        }
    }
}
