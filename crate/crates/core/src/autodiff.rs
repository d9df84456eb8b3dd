//! Forward-mode automatic differentiation.
//!
//! Two number types are provided: [`Dual`] carries a value and a gradient,
//! [`Jet2`] additionally carries the Hessian. Both store derivative parts
//! lazily: an empty vector stands for an all-zero derivative, so constants
//! never need to know how many variables are in play.
//!
//! Everything that needs derivatives (chart expressions, model frame fields)
//! is written once against the [`Scalar`] trait and evaluated with `f64`,
//! `Dual` or `Jet2` as required.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed to evaluate chart expressions and frame fields.
pub trait Scalar:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

/// Value, first and second derivative of `v^n`, avoiding `0 * inf` at `v = 0`.
fn powi_derivs(v: f64, n: i32) -> (f64, f64, f64) {
    match n {
        0 => (1.0, 0.0, 0.0),
        1 => (v, 1.0, 0.0),
        2 => (v * v, 2.0 * v, 2.0),
        _ => {
            let nf = n as f64;
            (v.powi(n), nf * v.powi(n - 1), nf * (nf - 1.0) * v.powi(n - 2))
        }
    }
}

fn zip_lazy(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Vec::new(),
        (false, true) => a.iter().map(|&x| f(x, 0.0)).collect(),
        (true, false) => b.iter().map(|&y| f(0.0, y)).collect(),
        (false, false) => {
            debug_assert_eq!(a.len(), b.len());
            a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
        }
    }
}

fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// First-order dual number over any number of variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl Dual {
    pub fn constant(value: f64) -> Self {
        Dual { value, grad: Vec::new() }
    }

    /// The `index`-th of `nvars` independent variables, at `value`.
    pub fn variable(value: f64, index: usize, nvars: usize) -> Self {
        let mut grad = vec![0.0; nvars];
        grad[index] = 1.0;
        Dual { value, grad }
    }

    /// Seeds every entry of `point` as an independent variable.
    pub fn seed(point: &[f64]) -> Vec<Dual> {
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Dual::variable(v, i, point.len()))
            .collect()
    }

    pub fn partial(&self, index: usize) -> f64 {
        self.grad.get(index).copied().unwrap_or(0.0)
    }

    fn chain(&self, f: f64, df: f64) -> Self {
        Dual { value: f, grad: scale(&self.grad, df) }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual { value: self.value + rhs.value, grad: zip_lazy(&self.grad, &rhs.grad, |a, b| a + b) }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual { value: self.value - rhs.value, grad: zip_lazy(&self.grad, &rhs.grad, |a, b| a - b) }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        let (a, b) = (self.value, rhs.value);
        Dual { value: a * b, grad: zip_lazy(&self.grad, &rhs.grad, |da, db| a * db + b * da) }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let (a, b) = (self.value, rhs.value);
        Dual {
            value: a / b,
            grad: zip_lazy(&self.grad, &rhs.grad, |da, db| (da * b - a * db) / (b * b)),
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { value: -self.value, grad: scale(&self.grad, -1.0) }
    }
}

impl Scalar for Dual {
    fn from_f64(v: f64) -> Self {
        Dual::constant(v)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn sin(&self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }
    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }
    fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn powi(&self, n: i32) -> Self {
        let (f, df, _) = powi_derivs(self.value, n);
        self.chain(f, df)
    }
}

/// Second-order jet: value, gradient and (row-major, symmetric) Hessian.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Jet2 { value, grad: Vec::new(), hess: Vec::new() }
    }

    pub fn variable(value: f64, index: usize, nvars: usize) -> Self {
        let mut grad = vec![0.0; nvars];
        grad[index] = 1.0;
        Jet2 { value, grad, hess: vec![0.0; nvars * nvars] }
    }

    pub fn seed(point: &[f64]) -> Vec<Jet2> {
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet2::variable(v, i, point.len()))
            .collect()
    }

    pub fn partial(&self, i: usize) -> f64 {
        self.grad.get(i).copied().unwrap_or(0.0)
    }

    pub fn second(&self, i: usize, j: usize) -> f64 {
        if self.hess.is_empty() {
            return 0.0;
        }
        let n = self.grad.len();
        self.hess[i * n + j]
    }

    /// Applies a scalar function given its value and first two derivatives.
    fn chain(&self, f: f64, df: f64, d2f: f64) -> Self {
        if self.grad.is_empty() {
            return Jet2::constant(f);
        }
        let n = self.grad.len();
        let mut hess = scale(&self.hess, df);
        if hess.is_empty() {
            hess = vec![0.0; n * n];
        }
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] += d2f * self.grad[i] * self.grad[j];
            }
        }
        Jet2 { value: f, grad: scale(&self.grad, df), hess }
    }

    fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            value: self.value + rhs.value,
            grad: zip_lazy(&self.grad, &rhs.grad, |a, b| a + b),
            hess: zip_lazy(&self.hess, &rhs.hess, |a, b| a + b),
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            value: self.value - rhs.value,
            grad: zip_lazy(&self.grad, &rhs.grad, |a, b| a - b),
            hess: zip_lazy(&self.hess, &rhs.hess, |a, b| a - b),
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let (a, b) = (self.value, rhs.value);
        let grad = zip_lazy(&self.grad, &rhs.grad, |da, db| a * db + b * da);
        let mut hess = zip_lazy(&self.hess, &rhs.hess, |ha, hb| a * hb + b * ha);
        if !self.grad.is_empty() && !rhs.grad.is_empty() {
            let n = self.grad.len();
            if hess.is_empty() {
                hess = vec![0.0; n * n];
            }
            for i in 0..n {
                for j in 0..n {
                    hess[i * n + j] +=
                        self.grad[i] * rhs.grad[j] + rhs.grad[i] * self.grad[j];
                }
            }
        }
        Jet2 { value: a * b, grad, hess }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 { value: -self.value, grad: scale(&self.grad, -1.0), hess: scale(&self.hess, -1.0) }
    }
}

impl Scalar for Jet2 {
    fn from_f64(v: f64) -> Self {
        Jet2::constant(v)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }
    fn powi(&self, n: i32) -> Self {
        let (f, df, d2f) = powi_derivs(self.value, n);
        self.chain(f, df, d2f)
    }
}

/// Inverts a small square matrix over any [`Scalar`] by Gauss-Jordan
/// elimination with partial pivoting on the real part.
pub fn invert<S: Scalar>(m: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut inv: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| S::from_f64(if i == j { 1.0 } else { 0.0 })).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].value().abs().total_cmp(&a[j][col].value().abs()))?;
        if a[pivot][col].value().abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = a[col][j].clone() / p.clone();
            inv[col][j] = inv[col][j].clone() / p.clone();
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = a[i][col].clone();
            for j in 0..n {
                a[i][j] = a[i][j].clone() - factor.clone() * a[col][j].clone();
                inv[i][j] = inv[i][j].clone() - factor.clone() * inv[col][j].clone();
            }
        }
    }
    Some(inv)
}
