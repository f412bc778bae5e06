//! Complex functions on `F_q` and `F_q^2`, additive Fourier analysis,
//! multiplicative differencing and averaged norms.
//!
//! Fourier convention: `f^(a) = E_x f(x) conj(psi_a(x))`, so that
//! `f(x) = sum_a f^(a) psi_a(x)`.

use crate::error::{Error, Result};
use crate::field::{make_field, Field, FieldElement};
use crate::par;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ONE_BOUNDED_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DenseFunction {
    field: Field,
    values: Vec<Complex64>,
}

impl DenseFunction {
    pub fn new(field: Field, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != field.q() {
            return Err(Error::ShapeMismatch(format!("expected {} values, got {}", field.q(), values.len())));
        }
        Ok(DenseFunction { field, values })
    }

    pub fn from_fn(field: &Field, f: impl Fn(usize) -> Complex64) -> Self {
        let values = (0..field.q()).map(f).collect();
        DenseFunction { field: field.clone(), values }
    }

    pub fn constant(field: &Field, c: Complex64) -> Self {
        Self::from_fn(field, |_| c)
    }

    pub fn zero(field: &Field) -> Self {
        Self::constant(field, Complex64::new(0.0, 0.0))
    }

    /// The additive character `psi_a`.
    pub fn character(field: &Field, a: usize) -> Self {
        Self::from_fn(field, |x| field.character_idx(a, x))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn q(&self) -> usize {
        self.values.len()
    }

    pub fn at(&self, x: usize) -> Complex64 {
        self.values[x]
    }

    pub fn is_one_bounded(&self) -> bool {
        self.sup_norm() <= 1.0 + ONE_BOUNDED_TOL
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn mean(&self) -> Complex64 {
        par::pairwise_sum(&self.values) / self.q() as f64
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        DenseFunction { field: self.field.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(DenseFunction { field: self.field.clone(), values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    /// Largest pointwise deviation.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn to_json(&self) -> FunctionJson {
        FunctionJson {
            p: self.field.p(),
            k: self.field.k(),
            modulus: (self.field.k() > 1).then(|| self.field.modulus().to_vec()),
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
        }
    }

    pub fn from_json(json: &FunctionJson) -> Result<Self> {
        let field = make_field(json.p, json.k, json.modulus.as_deref())?;
        Self::new(field, json.values.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }
}

/// On-disk form: `{"p":..,"k":..,"values":[[re,im],..]}` in index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionJson {
    pub p: u64,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    pub values: Vec<[f64; 2]>,
}

/// `F(x, y)` stored row-major with the first variable selecting the row.
#[derive(Debug, Clone)]
pub struct TwoVarFunction {
    field: Field,
    values: Vec<Complex64>,
}

impl TwoVarFunction {
    pub fn new(field: Field, values: Vec<Complex64>) -> Result<Self> {
        let q = field.q();
        if values.len() != q * q {
            return Err(Error::ShapeMismatch(format!("expected {}x{} values, got {}", q, q, values.len())));
        }
        Ok(TwoVarFunction { field, values })
    }

    pub fn from_fn(field: &Field, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let q = field.q();
        let values = (0..q * q).map(|i| f(i / q, i % q)).collect();
        TwoVarFunction { field: field.clone(), values }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.q()
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Complex64 {
        self.values[x * self.q() + y]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_one_bounded(&self) -> bool {
        self.values.iter().all(|v| v.norm() <= 1.0 + ONE_BOUNDED_TOL)
    }
}

/// `f^(a)` for every `a`, in index order.
#[derive(Debug, Clone)]
pub struct FourierCoefficients {
    field: Field,
    coeffs: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn new(field: Field, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != field.q() {
            return Err(Error::ShapeMismatch(format!("expected {} coefficients, got {}", field.q(), coeffs.len())));
        }
        Ok(FourierCoefficients { field, coeffs })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `sum_a |f^(a)|^r`.
    pub fn lp_sum(&self, r: f64) -> f64 {
        let terms: Vec<f64> = self.coeffs.iter().map(|c| c.norm().powf(r)).collect();
        par::pairwise_sum_f64(&terms)
    }
}

/// Table of `Tr(a x)` exponents, shared by the forward and inverse transforms.
fn exponent_row(field: &Field, a: usize) -> Vec<usize> {
    (0..field.q()).map(|x| field.char_exponent(a, x)).collect()
}

pub fn fourier_transform(f: &DenseFunction) -> FourierCoefficients {
    let field = f.field.clone();
    let q = field.q();
    let coeffs = par::map_range(q, |a| {
        let row = exponent_row(&field, a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, &e) in row.iter().enumerate() {
            acc += f.values[x] * field.root_of_unity(e).conj();
        }
        acc / q as f64
    });
    FourierCoefficients { field, coeffs }
}

pub fn inverse_fourier(c: &FourierCoefficients) -> DenseFunction {
    let field = c.field.clone();
    let values = par::map_range(field.q(), |x| {
        let row = exponent_row(&field, x);
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, &e) in row.iter().enumerate() {
            acc += c.coeffs[a] * field.root_of_unity(e);
        }
        acc
    });
    DenseFunction { field, values }
}

pub fn indicator(field: &Field, subset: &[FieldElement]) -> Result<DenseFunction> {
    let mut values = vec![Complex64::new(0.0, 0.0); field.q()];
    for a in subset {
        values[field.index_of(a).map_err(|_| Error::ElementOutOfField)?] = Complex64::new(1.0, 0.0);
    }
    Ok(DenseFunction { field: field.clone(), values })
}

/// Indicator of a set of element indices.
pub fn indicator_idx(field: &Field, subset: &[usize]) -> Result<DenseFunction> {
    let mut values = vec![Complex64::new(0.0, 0.0); field.q()];
    for &a in subset {
        *values.get_mut(a).ok_or(Error::ElementOutOfField)? = Complex64::new(1.0, 0.0);
    }
    Ok(DenseFunction { field: field.clone(), values })
}

/// `Delta_h f(x) = f(x + h) conj(f(x))`, iterated over `hs`.
pub fn delta_multi(f: &DenseFunction, hs: &[FieldElement]) -> Result<DenseFunction> {
    let idx: Vec<usize> = hs.iter().map(|h| f.field.index_of(h)).collect::<Result<_>>()?;
    Ok(delta_multi_idx(f, &idx))
}

pub fn delta_multi_idx(f: &DenseFunction, hs: &[usize]) -> DenseFunction {
    let field = &f.field;
    hs.iter().fold(f.clone(), |g, &h| DenseFunction::from_fn(field, |x| g.values[field.add_idx(x, h)] * g.values[x].conj()))
}

/// Differencing in the first variable only.
pub fn delta_first_var(f: &TwoVarFunction, hs: &[FieldElement]) -> Result<TwoVarFunction> {
    let idx: Vec<usize> = hs.iter().map(|h| f.field.index_of(h)).collect::<Result<_>>()?;
    Ok(delta_first_var_idx(f, &idx))
}

pub fn delta_first_var_idx(f: &TwoVarFunction, hs: &[usize]) -> TwoVarFunction {
    let field = &f.field;
    hs.iter().fold(f.clone(), |g, &h| TwoVarFunction::from_fn(field, |x, y| g.at(field.add_idx(x, h), y) * g.at(x, y).conj()))
}

/// Exponent of an averaged norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

/// `(E_x |f(x)|^p)^(1/p)`, or the sup norm.
pub fn lp_norm(f: &DenseFunction, p: Exponent) -> Result<f64> {
    match p {
        Exponent::Infinity => Ok(f.sup_norm()),
        Exponent::Finite(p) if p >= 1.0 && p.is_finite() => {
            let terms: Vec<f64> = f.values.iter().map(|v| v.norm().powf(p)).collect();
            Ok((par::pairwise_sum_f64(&terms) / f.q() as f64).powf(1.0 / p))
        }
        Exponent::Finite(p) => Err(Error::InvalidExponent(p)),
    }
}

/// `E_x f(x) conj(g(x))`.
pub fn inner(f: &DenseFunction, g: &DenseFunction) -> Result<Complex64> {
    f.check_same(g)?;
    let terms: Vec<Complex64> = f.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).collect();
    Ok(par::pairwise_sum(&terms) / f.q() as f64)
}
