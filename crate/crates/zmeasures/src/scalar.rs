//! Field abstraction shared by the exact-rational and complex-double
//! evaluation modes.
//!
//! Combinatorial identities (normalization, coherence, the determinantal
//! weight) are checked exactly over `BigRational`; analytic formulas
//! (Gamma, hypergeometric series) run over `Complex64`. Everything that
//! can be written with the four field operations is implemented once,
//! generically over [`Scalar`].

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A field element usable in both evaluation modes.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;

    /// Magnitude as f64, used for violation reports.
    fn abs_f64(&self) -> f64;

    /// Real part (or rational value) as f64.
    fn approx_f64(&self) -> f64;

    /// Exact equality for rationals, relative tolerance for complex.
    fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool;

    /// True when the evaluation mode is exact arithmetic.
    const EXACT: bool;
}

impl Scalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn abs_f64(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn approx_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn approx_eq(&self, other: &Self, _rel_tol: f64) -> bool {
        self == other
    }
    const EXACT: bool = true;
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_int(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_bigint(v: &BigInt) -> Self {
        Complex64::new(v.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn abs_f64(&self) -> f64 {
        self.norm()
    }
    fn approx_f64(&self) -> f64 {
        self.re
    }
    fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        let scale = self.norm().max(other.norm()).max(1.0);
        (self - other).norm() <= rel_tol * scale
    }
    const EXACT: bool = false;
}

/// Rising factorial (a)_n = a(a+1)...(a+n-1), as an explicit product.
pub fn pochhammer<S: Scalar>(a: &S, n: u64) -> S {
    let mut acc = S::one();
    let mut factor = a.clone();
    for _ in 0..n {
        acc = acc * factor.clone();
        factor = factor + S::one();
    }
    acc
}

/// n! as a scalar.
pub fn factorial<S: Scalar>(n: u64) -> S {
    let mut acc = S::one();
    for k in 2..=n {
        acc = acc * S::from_int(k as i64);
    }
    acc
}

/// Determinant by Laplace expansion; our matrices are at most d(lambda) x d(lambda).
pub fn determinant<S: Scalar>(m: &[Vec<S>]) -> S {
    let n = m.len();
    if n == 0 {
        return S::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = S::zero();
    for (j, entry) in m[0].iter().enumerate() {
        let minor: Vec<Vec<S>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = entry.clone() * determinant(&minor);
        det = if j % 2 == 0 { det + term } else { det - term };
    }
    det
}
