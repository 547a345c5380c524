//! The z-measure weights M_zz'(lambda), parameter classification,
//! coherence verification, and the determinantal form of the weights.
//!
//! Three independent evaluators compute the same weight: a product over
//! boxes, a row formula, and a hook-coordinate formula. Their mutual
//! agreement is itself one of the identities under test.

use crate::partitions::{dim, partitions_of, DimMethod, Partition};
use crate::scalar::{determinant, factorial, pochhammer, Scalar};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ZMeasureError {
    #[error("degenerate or invalid parameters: {0}")]
    DegenerateParameters(String),
}

/// Where a parameter pair sits in Proposition-2.2 terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Series {
    /// z' = conj(z), z not an integer; t = |z|^2 > 0.
    Principal,
    /// z, z' real, both inside one open interval (m, m+1).
    Complementary,
    /// z or z' integral; the measure lives on a truncated graph. Rejected.
    Degenerate,
    Invalid,
}

/// A user-supplied parameter value, exact or floating.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Rational(BigRational),
    Complex(Complex64),
}

impl ParamValue {
    fn is_integer(&self) -> bool {
        match self {
            ParamValue::Rational(r) => r.is_integer(),
            ParamValue::Complex(c) => c.im == 0.0 && c.re.fract() == 0.0,
        }
    }

    fn as_real(&self) -> Option<f64> {
        match self {
            ParamValue::Rational(r) => r.to_f64(),
            ParamValue::Complex(c) => (c.im == 0.0).then_some(c.re),
        }
    }
}

/// Classify a parameter pair per the positivity criterion: Principal iff
/// z' = conj(z) with z not integral; Complementary iff both real inside a
/// common (m, m+1); Degenerate iff z or z' is an integer.
pub fn classify(z: &ParamValue, zp: &ParamValue) -> Series {
    if z.is_integer() || zp.is_integer() {
        return Series::Degenerate;
    }
    if let (Some(a), Some(b)) = (z.as_real(), zp.as_real()) {
        return if a.floor() == b.floor() {
            Series::Complementary
        } else {
            Series::Invalid
        };
    }
    if let (ParamValue::Complex(a), ParamValue::Complex(b)) = (z, zp) {
        if a.im != 0.0 && *b == a.conj() {
            return Series::Principal;
        }
    }
    Series::Invalid
}

/// Validated z-measure parameters over a scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct ZParams<S: Scalar> {
    pub z: S,
    pub zp: S,
    pub t: S,
    pub series: Series,
}

impl ZParams<BigRational> {
    /// Complementary-series parameters with exact rational z, z'.
    pub fn rational(z: BigRational, zp: BigRational) -> Result<Self, ZMeasureError> {
        let series = classify(
            &ParamValue::Rational(z.clone()),
            &ParamValue::Rational(zp.clone()),
        );
        if series != Series::Complementary {
            return Err(ZMeasureError::DegenerateParameters(format!(
                "z={z}, z'={zp} classify as {series:?}"
            )));
        }
        let t = z.clone() * zp.clone();
        Ok(ZParams { z, zp, t, series })
    }

    /// Negated parameters (-z, -z'); used by the transpose symmetry.
    pub fn negated(&self) -> Result<Self, ZMeasureError> {
        ZParams::rational(-self.z.clone(), -self.zp.clone())
    }

    pub fn to_complex(&self) -> ZParams<Complex64> {
        let z = Complex64::new(self.z.to_f64().unwrap(), 0.0);
        let zp = Complex64::new(self.zp.to_f64().unwrap(), 0.0);
        ZParams {
            z,
            zp,
            t: z * zp,
            series: self.series,
        }
    }
}

impl ZParams<Complex64> {
    /// Principal- or complementary-series parameters as complex doubles.
    pub fn complex(z: Complex64, zp: Complex64) -> Result<Self, ZMeasureError> {
        let series = classify(&ParamValue::Complex(z), &ParamValue::Complex(zp));
        match series {
            Series::Principal | Series::Complementary => Ok(ZParams {
                z,
                zp,
                t: z * zp,
                series,
            }),
            other => Err(ZMeasureError::DegenerateParameters(format!(
                "z={z}, z'={zp} classify as {other:?}"
            ))),
        }
    }

    pub fn negated(&self) -> Result<Self, ZMeasureError> {
        ZParams::complex(-self.z, -self.zp)
    }
}

/// Weight evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMethod {
    /// Product of (z + c)(z' + c) over box contents c.
    Boxes,
    /// Row formula with Pochhammers (z - i + 1)_(lambda_i).
    Rows,
    /// Hook-coordinate formula, symmetric in the transposition symmetry.
    Frobenius,
}

/// M_zz'(lambda). Strictly positive for valid parameters; M(empty) = 1.
pub fn weight<S: Scalar>(lambda: &Partition, params: &ZParams<S>, method: WeightMethod) -> S {
    match method {
        WeightMethod::Boxes => weight_boxes(lambda, params),
        WeightMethod::Rows => weight_rows(lambda, params),
        WeightMethod::Frobenius => weight_frobenius(lambda, params),
    }
}

fn weight_boxes<S: Scalar>(lambda: &Partition, params: &ZParams<S>) -> S {
    let n = lambda.size();
    let mut prod = S::one();
    for c in lambda.contents() {
        let c = S::from_int(c);
        prod = prod * (params.z.clone() + c.clone()) * (params.zp.clone() + c);
    }
    let d = S::from_bigint(&BigInt::from(dim(lambda, DimMethod::Hook)));
    prod * d.clone() * d / (pochhammer(&params.t, n) * factorial::<S>(n))
}

fn weight_rows<S: Scalar>(lambda: &Partition, params: &ZParams<S>) -> S {
    let n = lambda.size();
    let l = lambda.len();
    let mut acc = factorial::<S>(n) / pochhammer(&params.t, n);
    for i in 1..=l {
        let zi = params.z.clone() - S::from_int(i as i64 - 1);
        let zpi = params.zp.clone() - S::from_int(i as i64 - 1);
        acc = acc * pochhammer(&zi, lambda.part(i)) * pochhammer(&zpi, lambda.part(i));
    }
    for i in 1..=l {
        for j in (i + 1)..=l {
            let diff = S::from_int(lambda.part(i) as i64 - lambda.part(j) as i64 + j as i64 - i as i64);
            acc = acc * diff.clone() * diff;
        }
        let f = factorial::<S>(lambda.part(i) + (l - i) as u64);
        acc = acc / (f.clone() * f);
    }
    acc
}

fn weight_frobenius<S: Scalar>(lambda: &Partition, params: &ZParams<S>) -> S {
    if lambda.is_empty() {
        return S::one();
    }
    let fc = lambda.frobenius();
    let d = fc.d();
    let n = lambda.size();
    let mut acc = factorial::<S>(n) / pochhammer(&params.t, n);
    for _ in 0..d {
        acc = acc * params.t.clone();
    }
    for i in 0..d {
        let (p, q) = (fc.p[i], fc.q[i]);
        acc = acc
            * pochhammer(&(params.z.clone() + S::one()), p)
            * pochhammer(&(params.zp.clone() + S::one()), p)
            * pochhammer(&(S::one() - params.z.clone()), q)
            * pochhammer(&(S::one() - params.zp.clone()), q);
        let fp = factorial::<S>(p);
        let fq = factorial::<S>(q);
        acc = acc / (fp.clone() * fp * fq.clone() * fq);
    }
    for i in 0..d {
        for j in 0..d {
            let h = S::from_int((fc.p[i] + fc.q[j] + 1) as i64);
            acc = acc / (h.clone() * h);
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let dp = S::from_int((fc.p[i] - fc.p[j]) as i64);
            let dq = S::from_int((fc.q[i] - fc.q[j]) as i64);
            acc = acc * dp.clone() * dp * dq.clone() * dq;
        }
    }
    acc
}

/// The matrix entry m_pq of the determinantal form of M/dim.
pub fn det_matrix_entry<S: Scalar>(p: u64, q: u64, params: &ZParams<S>) -> S {
    params.t.clone()
        * pochhammer(&(params.z.clone() + S::one()), p)
        * pochhammer(&(params.zp.clone() + S::one()), p)
        * pochhammer(&(S::one() - params.z.clone()), q)
        * pochhammer(&(S::one() - params.zp.clone()), q)
        / (factorial::<S>(p) * factorial::<S>(q) * S::from_int((p + q + 1) as i64))
}

/// det[m_(p_i q_j)] / (t)_n, which equals M(lambda)/dim(lambda).
pub fn det_weight<S: Scalar>(lambda: &Partition, params: &ZParams<S>) -> S {
    let fc = lambda.frobenius();
    let d = fc.d();
    let m: Vec<Vec<S>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| det_matrix_entry(fc.p[i], fc.q[j], params))
                .collect()
        })
        .collect();
    determinant(&m) / pochhammer(&params.t, lambda.size())
}

/// Outcome of a coherence or recurrence verification.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub max_violation: f64,
    pub exact: bool,
    pub pass: bool,
    pub worst_case: Option<String>,
}

/// Check M_n(mu) = sum over lambda covering mu of
/// (dim mu / dim lambda) M_(n+1)(lambda) for every mu of size n, and that
/// M_n sums to one. Violations are exactly zero in rational mode.
pub fn verify_coherence<S: Scalar>(n: u64, params: &ZParams<S>, tol: f64) -> VerifyReport {
    let mut max_violation = 0.0f64;
    let mut exact = true;
    let mut worst: Option<String> = None;

    let mut track = |v: &S, label: String| {
        let a = v.abs_f64();
        if a > max_violation {
            max_violation = a;
            worst = Some(label);
        }
        if *v != S::zero() {
            exact = false;
        }
    };

    for mu in partitions_of(n) {
        let m_mu = weight(&mu, params, WeightMethod::Boxes);
        let dim_mu = S::from_bigint(&BigInt::from(dim(&mu, DimMethod::Hook)));
        let mut rhs = S::zero();
        for lam in mu.add_boxes() {
            let dim_lam = S::from_bigint(&BigInt::from(dim(&lam, DimMethod::Hook)));
            rhs = rhs + dim_mu.clone() / dim_lam * weight(&lam, params, WeightMethod::Boxes);
        }
        track(&(m_mu - rhs), format!("coherence at {:?}", mu.parts()));
    }

    let total: S = partitions_of(n)
        .iter()
        .map(|lam| weight(lam, params, WeightMethod::Boxes))
        .fold(S::zero(), |a, b| a + b);
    track(&(total - S::one()), format!("normalization at n={n}"));

    let pass = if S::EXACT { exact } else { max_violation <= tol };
    VerifyReport {
        max_violation,
        exact,
        pass,
        worst_case: worst,
    }
}

/// Check the recurrence m_(p+1,q) + m_(p,q+1) - (p+q+1) m_(p,q) =
/// m_(p,0) m_(0,q) together with m_(0,0) = t.
pub fn verify_recurrence_84<S: Scalar>(
    p_max: u64,
    q_max: u64,
    params: &ZParams<S>,
    tol: f64,
) -> VerifyReport {
    let mut max_violation = 0.0f64;
    let mut exact = true;
    let mut worst = None;
    let base = det_matrix_entry(0, 0, params) - params.t.clone();
    if base != S::zero() {
        exact = false;
    }
    if base.abs_f64() > max_violation {
        max_violation = base.abs_f64();
        worst = Some("m_00 = t".to_string());
    }
    for p in 0..=p_max {
        for q in 0..=q_max {
            let lhs = det_matrix_entry(p + 1, q, params) + det_matrix_entry(p, q + 1, params)
                - S::from_int((p + q + 1) as i64) * det_matrix_entry(p, q, params);
            let rhs = det_matrix_entry(p, 0, params) * det_matrix_entry(0, q, params);
            let diff = lhs - rhs;
            if diff != S::zero() {
                exact = false;
            }
            let a = diff.abs_f64();
            if a > max_violation {
                max_violation = a;
                worst = Some(format!("recurrence at p={p}, q={q}"));
            }
        }
    }
    let pass = if S::EXACT { exact } else { max_violation <= tol };
    VerifyReport {
        max_violation,
        exact,
        pass,
        worst_case: worst,
    }
}

/// weight(transpose(lambda); z, z') = weight(lambda; -z, -z').
pub fn transpose_symmetry_check<S: Scalar>(
    lambda: &Partition,
    params: &ZParams<S>,
    negated: &ZParams<S>,
    tol: f64,
) -> bool {
    let lhs = weight(&lambda.transpose(), params, WeightMethod::Boxes);
    let rhs = weight(lambda, negated, WeightMethod::Boxes);
    if S::EXACT {
        lhs == rhs
    } else {
        lhs.approx_eq(&rhs, tol)
    }
}

/// Format an exact weight for serialization, e.g. "9/10".
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse "p/q" or integer strings into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if num_traits::Zero::is_zero(&d) {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

/// Parse "a+bi" / "a-bi" / plain real strings into a complex value.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim().replace(' ', "");
    if let Some(body) = s.strip_suffix('i') {
        // Split the imaginary coefficient off at the last +/- that is not
        // an exponent sign or leading sign.
        let bytes = body.as_bytes();
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && bytes[k - 1] as char != 'e' && bytes[k - 1] as char != 'E'
            {
                let re: f64 = body[..k].parse().ok()?;
                let im_str = &body[k..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().ok()?
                };
                return Some(Complex64::new(re, im));
            }
        }
        let im: f64 = if body.is_empty() { 1.0 } else { body.parse().ok()? };
        return Some(Complex64::new(0.0, im));
    }
    // Accept rationals in complex position too.
    if let Some(r) = parse_rational(&s) {
        return Some(Complex64::new(r.to_f64()?, 0.0));
    }
    s.parse().ok().map(|re| Complex64::new(re, 0.0))
}
