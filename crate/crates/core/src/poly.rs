//! Integer polynomials in one variable `y`, progression systems and their
//! independence certificates.

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

/// `sum coeffs[i] y^i` with trailing zeros stripped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPoly { coeffs };
        p.normalize();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `c * y^d`.
    pub fn monomial(c: i64, d: usize) -> Self {
        let mut v = vec![0; d + 1];
        v[d] = c;
        Self::from_i64(&v)
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `y^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn has_zero_constant_term(&self) -> bool {
        self.coeffs.first().is_none_or(|c| c.is_zero())
    }

    /// Coefficients reduced into `0..p`.
    pub fn reduce_mod(&self, p: u64) -> Vec<u64> {
        let m = BigInt::from(p);
        self.coeffs.iter().map(|c| c.mod_floor(&m).to_u64().expect("reduced below p")).collect()
    }

    /// Evaluation at the field element with index `y`, by Horner's scheme.
    pub fn eval_idx(&self, field: &FieldSpec, y: usize) -> usize {
        let reduced = self.reduce_mod(field.p());
        if field.is_prime_field() {
            let p = field.p() as u128;
            let y = y as u128;
            return reduced.iter().rev().fold(0u128, |acc, &c| (acc * y + c as u128) % p) as usize;
        }
        reduced.iter().rev().fold(0usize, |acc, &c| field.add_idx(field.mul_idx(acc, y), c as usize))
    }

    /// `y -> P(y)` for every element index.
    pub fn value_table(&self, field: &FieldSpec) -> Vec<usize> {
        (0..field.q()).map(|y| self.eval_idx(field, y)).collect()
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul<i64> for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: i64) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * rhs).collect())
    }
}

/// Canonical rendering, highest degree first: `y^2 + 3y`, `-2y^3 + y - 1`.
impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            if d == 0 || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            match d {
                0 => {}
                1 => f.write_str("y")?,
                _ => write!(f, "y^{d}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for IntPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}

impl Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_poly(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses `term (("+"|"-") term)*` with `term = [int]["y"["^"int]]`.
/// Whitespace is ignored and a leading sign is accepted.
pub fn parse_poly(text: &str) -> Result<IntPoly> {
    let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let err = |pos: usize, msg: &str| Error::Syntax { pos, msg: msg.to_string() };
    let end_pos = text.len();
    let mut i = 0;
    let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
    let mut first = true;
    loop {
        let pos = chars.get(i).map_or(end_pos, |c| c.0);
        let mut negative = false;
        match chars.get(i).map(|c| c.1) {
            Some('+') if !first => i += 1,
            Some('-') => {
                negative = true;
                i += 1;
            }
            Some(_) if first => {}
            None if first => return Err(err(pos, "empty polynomial")),
            _ => return Err(err(pos, "expected '+' or '-'")),
        }
        first = false;
        let term_pos = chars.get(i).map_or(end_pos, |c| c.0);
        let digits: String = chars[i..].iter().map(|c| c.1).take_while(|c| c.is_ascii_digit()).collect();
        i += digits.len();
        let has_y = chars.get(i).map(|c| c.1) == Some('y');
        if digits.is_empty() && !has_y {
            return Err(err(term_pos, "expected an integer or 'y'"));
        }
        let mut coeff = if digits.is_empty() { BigInt::one() } else { digits.parse::<BigInt>().expect("digits") };
        let mut degree = 0usize;
        if has_y {
            i += 1;
            degree = 1;
            if chars.get(i).map(|c| c.1) == Some('^') {
                i += 1;
                let exp_pos = chars.get(i).map_or(end_pos, |c| c.0);
                let exp: String = chars[i..].iter().map(|c| c.1).take_while(|c| c.is_ascii_digit()).collect();
                if exp.is_empty() {
                    return Err(err(exp_pos, "expected an exponent after '^'"));
                }
                i += exp.len();
                degree = exp.parse().map_err(|_| err(exp_pos, "exponent too large"))?;
                if degree > 4096 {
                    return Err(err(exp_pos, "exponent too large"));
                }
            }
        }
        if negative {
            coeff = -coeff;
        }
        *acc.entry(degree).or_default() += coeff;
        if i >= chars.len() {
            break;
        }
    }
    let deg = acc.keys().next_back().copied().unwrap_or(0);
    let mut coeffs = vec![BigInt::zero(); deg + 1];
    for (d, c) in acc {
        coeffs[d] = c;
    }
    Ok(IntPoly::new(coeffs))
}

/// Parses a comma-separated list of polynomials.
pub fn parse_poly_list(text: &str) -> Result<Vec<IntPoly>> {
    if text.trim().is_empty() {
        return Ok(vec![]);
    }
    let mut offset = 0;
    let mut out = vec![];
    for part in text.split(',') {
        out.push(parse_poly(part).map_err(|e| match e {
            Error::Syntax { pos, msg } => Error::Syntax { pos: pos + offset, msg },
            other => other,
        })?);
        offset += part.len() + 1;
    }
    Ok(out)
}

/// `v_i` = number of distinct leading terms of degree `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DegreeSequence {
    pub v: BTreeMap<usize, usize>,
}

impl DegreeSequence {
    pub fn get(&self, i: usize) -> usize {
        self.v.get(&i).copied().unwrap_or(0)
    }
}

pub fn degree_sequence(polys: &[IntPoly]) -> Result<DegreeSequence> {
    let mut terms: BTreeMap<usize, Vec<&BigInt>> = BTreeMap::new();
    for p in polys {
        let d = p.degree().ok_or(Error::ZeroPolynomial)?;
        let lc = p.leading_coeff().expect("nonzero");
        let entry = terms.entry(d).or_default();
        if !entry.contains(&lc) {
            entry.push(lc);
        }
    }
    Ok(DegreeSequence { v: terms.into_iter().filter(|(d, _)| *d >= 1).map(|(d, t)| (d, t.len())).collect() })
}

/// A nonvanishing maximal minor of the coefficient matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Degrees (matrix rows) of the minor, ascending.
    pub rows: Vec<usize>,
    /// Polynomial order (matrix columns) used for the determinant.
    pub cols: Vec<usize>,
    #[serde(with = "bigint_string")]
    pub det: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Independence {
    Independent(Certificate),
    /// Primitive integer vector `lambda` with `sum lambda_i P_i = 0`.
    Dependent(Vec<BigInt>),
}

/// The `(d+1) x m` matrix whose column `j` holds the coefficients of `polys[j]`.
pub fn coefficient_matrix(polys: &[IntPoly]) -> Vec<Vec<BigInt>> {
    let d = polys.iter().filter_map(IntPoly::degree).max().unwrap_or(0);
    (0..=d).map(|i| polys.iter().map(|p| p.coeff(i)).collect()).collect()
}

/// Fraction-free Gaussian elimination with row pivoting.
pub fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Reduced row echelon form over Q; returns the pivot columns.
fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of the coefficient matrix over Q.
pub fn rational_rank(polys: &[IntPoly]) -> usize {
    let mut m: Vec<Vec<BigRational>> = coefficient_matrix(polys)
        .into_iter()
        .map(|row| row.into_iter().map(BigRational::from_integer).collect())
        .collect();
    rref(&mut m).len()
}

fn kernel_vector(polys: &[IntPoly]) -> Option<Vec<BigInt>> {
    let mut m: Vec<Vec<BigRational>> = coefficient_matrix(polys)
        .into_iter()
        .map(|row| row.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let pivots = rref(&mut m);
    let n = polys.len();
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut lambda = vec![BigRational::zero(); n];
    lambda[free] = BigRational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        lambda[pc] = -m[r][free].clone();
    }
    let denom = lambda.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = lambda.iter().map(|x| (x * BigRational::from_integer(denom.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() {
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
    }
    if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in ints.iter_mut() {
            *x = -&*x;
        }
    }
    Some(ints)
}

/// Lexicographic successor of an ascending `k`-subset of `0..n`.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Certificate of linear independence over Q, or an explicit dependence.
/// The minor is the lexicographically first row set with nonzero determinant.
pub fn independence_certificate(polys: &[IntPoly]) -> Result<Independence> {
    if polys.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(lambda) = kernel_vector(polys) {
        return Ok(Independence::Dependent(lambda));
    }
    let m = polys.len();
    let matrix = coefficient_matrix(polys);
    let n_rows = matrix.len();
    let mut rows: Vec<usize> = (0..m).collect();
    loop {
        let minor: Vec<Vec<BigInt>> = rows.iter().map(|&r| matrix[r].clone()).collect();
        let det = bareiss_determinant(minor);
        if !det.is_zero() {
            return Ok(Independence::Independent(Certificate { rows, cols: (0..m).collect(), det }));
        }
        if !next_combination(&mut rows, n_rows) {
            unreachable!("full column rank implies a nonzero maximal minor");
        }
    }
}

const TRIAL_LIMIT: u64 = 10_000_000;

/// `1 + (largest prime dividing |det|)`, or 2 when `|det| = 1`.
///
/// Factors by trial division up to 10^7; a cofactor left over after that is
/// treated as if it were prime, which can only make the threshold larger.
pub fn threshold_from_determinant(det: &BigInt) -> BigUint {
    let mut n = det.magnitude().clone();
    assert!(!n.is_zero(), "certificate determinant is nonzero");
    let mut largest = BigUint::one();
    let mut d = 2u64;
    while d <= TRIAL_LIMIT {
        let bd = BigUint::from(d);
        if &bd * &bd > n {
            break;
        }
        if (&n % &bd).is_zero() {
            largest = bd.clone();
            while (&n % &bd).is_zero() {
                n /= &bd;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > BigUint::one() {
        largest = largest.max(n);
    }
    if largest.is_one() {
        BigUint::from(2u32)
    } else {
        largest + 1u32
    }
}

/// A list of polynomials `P_1..P_m` and twisting polynomials `Q_1..Q_n`,
/// all in `Z[y]_0` and nonzero. No independence requirement: this is the
/// shape counted by [`crate::counting`] and searched by [`crate::extremal`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolySystem {
    pub p: Vec<IntPoly>,
    pub q: Vec<IntPoly>,
}

fn check_member(poly: &IntPoly) -> Result<()> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !poly.has_zero_constant_term() {
        return Err(Error::NonzeroConstantTerm(poly.to_string()));
    }
    Ok(())
}

impl PolySystem {
    pub fn new(p: Vec<IntPoly>, q: Vec<IntPoly>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::EmptyInput);
        }
        p.iter().chain(&q).try_for_each(check_member)?;
        Ok(PolySystem { p, q })
    }

    pub fn parse(p: &str, q: &str) -> Result<Self> {
        Self::new(parse_poly_list(p)?, parse_poly_list(q)?)
    }

    pub fn m1(&self) -> usize {
        self.p.len()
    }

    pub fn m2(&self) -> usize {
        self.q.len()
    }

    pub fn is_pure(&self) -> bool {
        self.q.is_empty()
    }

    pub fn all(&self) -> impl Iterator<Item = &IntPoly> {
        self.p.iter().chain(&self.q)
    }

    pub fn describe(&self) -> String {
        let ps: Vec<String> = self.p.iter().map(ToString::to_string).collect();
        let qs: Vec<String> = self.q.iter().map(ToString::to_string).collect();
        if qs.is_empty() {
            format!("({})", ps.join(", "))
        } else {
            format!("({}; {})", ps.join(", "), qs.join(", "))
        }
    }
}

/// A [`PolySystem`] whose members are distinct and linearly independent
/// over Q, together with the certificate and the characteristic threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionSystem {
    polys: PolySystem,
    certificate: Certificate,
    #[serde(with = "biguint_string")]
    threshold: BigUint,
}

impl ProgressionSystem {
    pub fn new(p: Vec<IntPoly>, q: Vec<IntPoly>) -> Result<Self> {
        let polys = PolySystem::new(p, q)?;
        let all: Vec<IntPoly> = polys.all().cloned().collect();
        for (i, a) in all.iter().enumerate() {
            if all[..i].contains(a) {
                return Err(Error::DuplicatePolynomial(a.to_string()));
            }
        }
        match independence_certificate(&all)? {
            Independence::Independent(certificate) => {
                let threshold = threshold_from_determinant(&certificate.det);
                Ok(ProgressionSystem { polys, certificate, threshold })
            }
            Independence::Dependent(w) => Err(Error::DependentSystem { witness: w.iter().map(ToString::to_string).collect() }),
        }
    }

    pub fn parse(p: &str, q: &str) -> Result<Self> {
        Self::new(parse_poly_list(p)?, parse_poly_list(q)?)
    }

    pub fn polys(&self) -> &PolySystem {
        &self.polys
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn threshold(&self) -> &BigUint {
        &self.threshold
    }

    /// Whether a field of characteristic `p` meets the certified threshold.
    pub fn admits_characteristic(&self, p: u64) -> bool {
        BigUint::from(p) >= self.threshold
    }
}

impl std::ops::Deref for ProgressionSystem {
    type Target = PolySystem;
    fn deref(&self) -> &PolySystem {
        &self.polys
    }
}

/// The threshold `c` of a certified system.
pub fn characteristic_threshold(system: &ProgressionSystem) -> BigUint {
    system.threshold.clone()
}

/// `P(y)` over `F_q`, coefficients reduced mod `p`.
pub fn reduce_and_eval(poly: &IntPoly, field: &FieldSpec, y: &FieldElement) -> Result<FieldElement> {
    let yi = field.index_of(y)?;
    Ok(field.element(poly.eval_idx(field, yi)))
}

/// Rank of the coefficient matrix reduced mod `p`.
pub fn rank_mod_p(polys: &[IntPoly], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = coefficient_matrix(polys)
        .into_iter()
        .map(|row| {
            let bp = BigInt::from(p);
            row.iter().map(|c| c.mod_floor(&bp).to_u64().expect("reduced")).collect()
        })
        .collect();
    let rows = m.len();
    let cols = polys.len();
    let mut r = 0;
    let pp = p as u128;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, pr);
        let inv = {
            let mut acc = 1u128;
            let mut base = m[r][c] as u128;
            let mut e = p - 2;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * base % pp;
                }
                base = base * base % pp;
                e >>= 1;
            }
            acc
        };
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c] as u128 * inv % pp;
                for j in 0..cols {
                    m[i][j] = ((m[i][j] as u128 + pp - f * m[r][j] as u128 % pp) % pp) as u64;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

mod biguint_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use proptest::prelude::*;

    fn p(s: &str) -> IntPoly {
        parse_poly(s).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("y^2+3y").coeffs(), big(&[0, 3, 1]).as_slice());
        assert_eq!(p("2y - y").coeffs(), big(&[0, 1]).as_slice());
        let c = p("y^2+1");
        assert_eq!(c.coeffs(), big(&[1, 0, 1]).as_slice());
        assert!(!c.has_zero_constant_term());
        assert_eq!(p("-y^3 + 12 y").coeffs(), big(&[0, 12, 0, -1]).as_slice());
        assert!(p("y - y").is_zero());
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(parse_poly("").unwrap_err(), Error::Syntax { pos: 0, msg: "empty polynomial".into() });
        assert!(matches!(parse_poly("y^"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_poly("y +"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_poly("y*2"), Err(Error::Syntax { pos: 1, .. })));
        assert!(matches!(parse_poly("3x"), Err(Error::Syntax { pos: 1, .. })));
        assert!(matches!(parse_poly_list("y, y^"), Err(Error::Syntax { pos: 5, .. })));
    }

    #[test]
    fn render_is_canonical() {
        assert_eq!(p("3y + y^2").to_string(), "y^2 + 3y");
        assert_eq!(p("-y + 2y^3 - 4").to_string(), "2y^3 - y - 4");
        assert_eq!(p("-y").to_string(), "-y");
        assert_eq!(IntPoly::default().to_string(), "0");
    }

    proptest! {
        #[test]
        fn parse_render_roundtrip(coeffs in prop::collection::vec(-50i64..50, 0..8)) {
            let poly = IntPoly::from_i64(&coeffs);
            prop_assert_eq!(parse_poly(&poly.to_string()).unwrap(), poly);
        }

        #[test]
        fn degree_sequence_permutation_invariant(
            polys in prop::collection::vec(prop::collection::vec(-3i64..4, 2..5), 1..6),
            seed in any::<u64>(),
        ) {
            let polys: Vec<IntPoly> = polys
                .iter()
                .map(|c| { let mut c = c.clone(); c[0] = 0; IntPoly::from_i64(&c) })
                .filter(|p| !p.is_zero())
                .collect();
            prop_assume!(!polys.is_empty());
            let mut shuffled = polys.clone();
            let mut r = crate::rng::seeded(seed);
            let perm = crate::rng::permutation(&mut r, shuffled.len());
            shuffled = perm.iter().map(|&i| polys[i].clone()).collect();
            prop_assert_eq!(degree_sequence(&polys).unwrap(), degree_sequence(&shuffled).unwrap());
        }

        #[test]
        fn evaluation_is_additive(a in prop::collection::vec(-20i64..20, 1..6), b in prop::collection::vec(-20i64..20, 1..6), y in 0usize..49) {
            let f = make_field(7, 2, None).unwrap();
            let pa = IntPoly::from_i64(&a);
            let pb = IntPoly::from_i64(&b);
            let sum = &pa + &pb;
            prop_assert_eq!(sum.eval_idx(&f, y), f.add_idx(pa.eval_idx(&f, y), pb.eval_idx(&f, y)));
        }
    }

    #[test]
    fn degree_sequence_examples() {
        let ds = degree_sequence(&[p("y"), p("2y"), p("y^2"), p("y^2+3y"), p("y^5")]).unwrap();
        assert_eq!((ds.get(1), ds.get(2), ds.get(3), ds.get(4), ds.get(5), ds.get(6)), (2, 1, 0, 0, 1, 0));
        assert_eq!(degree_sequence(&[p("y")]).unwrap().get(1), 1);
        assert_eq!(degree_sequence(&[p("y^2"), p("3y^2"), p("3y^2+y")]).unwrap().get(2), 2);
        assert_eq!(degree_sequence(&[p("y"), IntPoly::default()]).unwrap_err(), Error::ZeroPolynomial);
    }

    #[test]
    fn certificate_examples() {
        match independence_certificate(&[p("y"), p("y^2")]).unwrap() {
            Independence::Independent(c) => assert_eq!(c.det.abs(), BigInt::one()),
            other => panic!("{other:?}"),
        }
        assert_eq!(independence_certificate(&[p("y"), p("2y")]).unwrap(), Independence::Dependent(big(&[2, -1])));
        match independence_certificate(&[p("6y"), p("y^2")]).unwrap() {
            Independence::Independent(c) => {
                assert_eq!(c.det, BigInt::from(6));
                assert_eq!(c.rows, vec![1, 2]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(independence_certificate(&[]).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        fn cofactor(m: &[Vec<i64>]) -> i64 {
            if m.len() == 1 {
                return m[0][0];
            }
            (0..m.len())
                .map(|j| {
                    let minor: Vec<Vec<i64>> =
                        m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, &v)| v).collect()).collect();
                    let s = if j % 2 == 0 { 1 } else { -1 };
                    s * m[0][j] * cofactor(&minor)
                })
                .sum()
        }
        let mut r = crate::rng::seeded(11);
        for n in 1..=5 {
            for _ in 0..40 {
                let m: Vec<Vec<i64>> =
                    (0..n).map(|_| (0..n).map(|_| crate::rng::below(&mut r, 9) as i64 - 4).collect()).collect();
                let big_m: Vec<Vec<BigInt>> = m.iter().map(|row| big(row)).collect();
                assert_eq!(bareiss_determinant(big_m), BigInt::from(cofactor(&m)));
            }
        }
    }

    /// Independent route: brute-force search for a small integer dependence.
    fn brute_force_dependent(polys: &[IntPoly]) -> bool {
        let m = polys.len();
        let range: Vec<i64> = (-6..=6).collect();
        let total = range.len().pow(m as u32);
        (1..total).any(|mut code| {
            let lambda: Vec<i64> = (0..m)
                .map(|_| {
                    let v = range[code % range.len()];
                    code /= range.len();
                    v
                })
                .collect();
            if lambda.iter().all(|&x| x == 0) {
                return false;
            }
            let combo = polys.iter().zip(&lambda).fold(IntPoly::default(), |acc, (p, &l)| &acc + &(p * l));
            combo.is_zero()
        })
    }

    #[test]
    fn certificate_agrees_with_kernel_search_on_all_subsets() {
        let pool = [p("y"), p("2y"), p("3y"), p("y^2"), p("y^2+y"), p("y^3")];
        for mask in 1u32..64 {
            let subset: Vec<IntPoly> = (0..6).filter(|i| mask >> i & 1 == 1).map(|i| pool[i].clone()).collect();
            let cert = independence_certificate(&subset).unwrap();
            let dependent = brute_force_dependent(&subset);
            match cert {
                Independence::Independent(c) => {
                    assert!(!dependent, "mask {mask}");
                    assert!(!c.det.is_zero());
                }
                Independence::Dependent(lambda) => {
                    assert!(dependent, "mask {mask}");
                    let combo = subset.iter().zip(&lambda).fold(IntPoly::default(), |acc, (p, l)| {
                        &acc + &IntPoly::new(p.coeffs().iter().map(|c| c * l).collect())
                    });
                    assert!(combo.is_zero());
                }
            }
        }
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_from_determinant(&BigInt::one()), BigUint::from(2u32));
        assert_eq!(threshold_from_determinant(&BigInt::from(6)), BigUint::from(4u32));
        assert_eq!(threshold_from_determinant(&BigInt::from(-30)), BigUint::from(6u32));
        assert_eq!(threshold_from_determinant(&BigInt::from(49)), BigUint::from(8u32));
    }

    #[test]
    fn reduced_systems_stay_independent_above_threshold() {
        let battery = [
            "y, y^2",
            "6y, y^2",
            "y, y^2, y^3",
            "2y, 3y^2",
            "y^2 + y, y^2 - y",
            "5y, 7y^2, 11y^3",
            "y, y^2 + 3y, y^5",
            "y^3 - y, y^2",
            "12y, 18y^2",
            "y^2+2y, 3y^2+y, y^3",
            "10y^2 + 3y, y",
            "y^4, y^3, y^2, y",
            "30y",
            "y + y^2 + y^3, y - y^3",
            "2y^2 - 4y, 3y",
            "y^7, 14y",
            "4y^2, 6y",
            "y^2 + 9y, 9y^2 + y",
            "13y^3, 13y",
            "y^6 + y, y^5 - y^2, 8y^3",
        ];
        let primes: Vec<u64> = (2..=200).filter(|&n| crate::field::is_prime(n)).collect();
        for text in battery {
            let sys = ProgressionSystem::parse(text, "").unwrap();
            let all: Vec<IntPoly> = sys.all().cloned().collect();
            for &pr in &primes {
                if sys.admits_characteristic(pr) {
                    assert_eq!(rank_mod_p(&all, pr), all.len(), "{text} mod {pr}");
                }
            }
        }
    }

    #[test]
    fn system_validation() {
        assert!(matches!(ProgressionSystem::parse("y, 2y", ""), Err(Error::DependentSystem { .. })));
        assert!(matches!(ProgressionSystem::parse("y^2+1", ""), Err(Error::NonzeroConstantTerm(_))));
        assert!(matches!(ProgressionSystem::parse("y, y", ""), Err(Error::DuplicatePolynomial(_))));
        assert!(matches!(ProgressionSystem::parse("", "y"), Err(Error::EmptyInput)));
        assert!(matches!(ProgressionSystem::parse("y, y - y", ""), Err(Error::ZeroPolynomial)));
        let sys = ProgressionSystem::parse("6y", "y^2").unwrap();
        assert_eq!(characteristic_threshold(&sys), BigUint::from(4u32));
        assert!(sys.admits_characteristic(5));
        assert!(!sys.admits_characteristic(3));
        // dependent systems are fine as plain PolySystems
        assert!(PolySystem::parse("y, 2y", "").is_ok());
    }

    #[test]
    fn reduce_and_eval_examples() {
        let f7 = make_field(7, 1, None).unwrap();
        assert_eq!(reduce_and_eval(&p("y^2"), &f7, &f7.from_int(3)).unwrap(), f7.from_int(2));
        for s in ["y^3 + 5y", "y^2", "-3y^4 + y"] {
            assert_eq!(reduce_and_eval(&p(s), &f7, &f7.zero()).unwrap(), f7.zero());
        }
        for y in 0..7 {
            assert_eq!(reduce_and_eval(&p("7y"), &f7, &f7.from_int(y)).unwrap(), f7.zero());
        }
        let f9 = make_field(3, 2, None).unwrap();
        let t = FieldElement { coeffs: vec![0, 1] };
        // t^2 + t = -1 + t
        assert_eq!(reduce_and_eval(&p("y^2 + y"), &f9, &t).unwrap(), FieldElement { coeffs: vec![2, 1] });
    }
}
