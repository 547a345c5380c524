//! Young diagrams, Frobenius coordinates, hooks, the Young and Kingman
//! graphs, and the dimension functions on both.
//!
//! All combinatorial quantities are exact: dimensions are `BigUint`s and
//! never overflow. Box indices are 1-based, matching the (i, j) row/column
//! convention for the content j - i of a box.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("parts must be weakly decreasing and positive, got {0:?}")]
    NotWeaklyDecreasing(Vec<u64>),
    #[error("box ({0},{1}) is outside the diagram")]
    BoxOutOfShape(usize, usize),
    #[error("{0:?} does not cover {1:?} in the Young graph")]
    NotAnEdge(Vec<u64>, Vec<u64>),
    #[error("point is not in the Thoma simplex: {0}")]
    InvalidSimplexPoint(String),
}

/// A Young diagram: weakly decreasing positive parts. The empty vector is
/// the empty diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u64>,
}

/// Hook coordinates (p_1 > ... > p_d >= 0 | q_1 > ... > q_d >= 0) of a
/// diagram, with p_i = lambda_i - i and q_i = (lambda^t)_i - i.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusCoords {
    pub p: Vec<u64>,
    pub q: Vec<u64>,
}

impl FrobeniusCoords {
    pub fn d(&self) -> usize {
        self.p.len()
    }
}

/// Multiplicity view: r_k = number of parts equal to k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentialForm {
    pub multiplicities: BTreeMap<u64, u64>,
}

/// One growth method for adding a box: `paths` enumerates the recurrence
/// dim(lambda) = sum over mu covered by lambda, and is the oracle for the
/// three closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimMethod {
    Hook,
    Determinant,
    Frobenius,
    Paths,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim0Method {
    Recurrence,
    ClosedForm,
}

impl Partition {
    pub fn new(parts: Vec<u64>) -> Result<Self, PartitionError> {
        for w in parts.windows(2) {
            if w[0] < w[1] {
                return Err(PartitionError::NotWeaklyDecreasing(parts));
            }
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(PartitionError::NotWeaklyDecreasing(parts));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: vec![] }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// |lambda|, the number of boxes.
    pub fn size(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// ell(lambda), the number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Part lambda_i with 1-based i; zero beyond the last row.
    pub fn part(&self, i: usize) -> u64 {
        if i >= 1 && i <= self.parts.len() {
            self.parts[i - 1]
        } else {
            0
        }
    }

    pub fn transpose(&self) -> Partition {
        if self.parts.is_empty() {
            return Partition::empty();
        }
        let cols = self.parts[0] as usize;
        let mut t = Vec::with_capacity(cols);
        for j in 1..=cols {
            t.push(self.parts.iter().filter(|&&p| p >= j as u64).count() as u64);
        }
        Partition { parts: t }
    }

    /// Diagonal length d(lambda).
    pub fn diagonal(&self) -> usize {
        self.parts
            .iter()
            .enumerate()
            .take_while(|(i, &p)| p as usize > *i)
            .count()
    }

    pub fn frobenius(&self) -> FrobeniusCoords {
        let t = self.transpose();
        let d = self.diagonal();
        let p = (1..=d).map(|i| self.part(i) - i as u64).collect();
        let q = (1..=d).map(|i| t.part(i) - i as u64).collect();
        FrobeniusCoords { p, q }
    }

    pub fn from_frobenius(coords: &FrobeniusCoords) -> Result<Self, PartitionError> {
        let d = coords.p.len();
        if coords.q.len() != d {
            return Err(PartitionError::NotWeaklyDecreasing(coords.p.clone()));
        }
        for w in coords.p.windows(2) {
            if w[0] <= w[1] {
                return Err(PartitionError::NotWeaklyDecreasing(coords.p.clone()));
            }
        }
        for w in coords.q.windows(2) {
            if w[0] <= w[1] {
                return Err(PartitionError::NotWeaklyDecreasing(coords.q.clone()));
            }
        }
        // Rows above the diagonal: lambda_i = p_i + i.
        let mut parts: Vec<u64> = coords
            .p
            .iter()
            .enumerate()
            .map(|(i, &p)| p + i as u64 + 1)
            .collect();
        // Columns: row i > d has lambda_i = #{j : q_j >= i - j}.
        let max_row = coords.q.iter().enumerate().map(|(j, &q)| q + j as u64 + 1).max().unwrap_or(0);
        for i in (d as u64 + 1)..=max_row {
            let len = coords
                .q
                .iter()
                .enumerate()
                .filter(|(j, &q)| q + *j as u64 + 1 >= i)
                .count() as u64;
            if len > 0 {
                parts.push(len);
            }
        }
        Partition::new(parts)
    }

    /// Hook length h(i, j) = arm + leg + 1, with 1-based box coordinates.
    pub fn hook_length(&self, i: usize, j: usize) -> Result<u64, PartitionError> {
        if i == 0 || j == 0 || self.part(i) < j as u64 {
            return Err(PartitionError::BoxOutOfShape(i, j));
        }
        let arm = self.part(i) - j as u64;
        let leg = self.transpose().part(j) - i as u64;
        Ok(arm + leg + 1)
    }

    /// Content j - i of a box, signed.
    pub fn contents(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.size() as usize);
        for (i, &p) in self.parts.iter().enumerate() {
            for j in 1..=p {
                out.push(j as i64 - (i as i64 + 1));
            }
        }
        out
    }

    /// All diagrams obtained by adding one box, ordered by row index of the
    /// new box.
    pub fn add_boxes(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        for i in 0..self.parts.len() {
            if i == 0 || self.parts[i] < self.parts[i - 1] {
                let mut parts = self.parts.clone();
                parts[i] += 1;
                out.push(Partition { parts });
            }
        }
        let mut parts = self.parts.clone();
        parts.push(1);
        out.push(Partition { parts });
        out
    }

    /// All diagrams obtained by removing one corner box.
    pub fn remove_boxes(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        for i in 0..self.parts.len() {
            let is_corner = i + 1 == self.parts.len() || self.parts[i] > self.parts[i + 1];
            if is_corner {
                let mut parts = self.parts.clone();
                parts[i] -= 1;
                if parts[i] == 0 {
                    parts.remove(i);
                }
                out.push(Partition { parts });
            }
        }
        out
    }

    /// Multiplicity view of the parts.
    pub fn exponential_form(&self) -> ExponentialForm {
        let mut multiplicities = BTreeMap::new();
        for &p in &self.parts {
            *multiplicities.entry(p).or_insert(0) += 1;
        }
        ExponentialForm { multiplicities }
    }

    /// z_lambda = prod_i lambda_i * prod_k r_k!.
    pub fn z_lambda(&self) -> BigUint {
        let mut z = BigUint::one();
        for &p in &self.parts {
            z *= BigUint::from(p);
        }
        for (_, &r) in &self.exponential_form().multiplicities {
            z *= factorial_biguint(r);
        }
        z
    }
}

fn factorial_biguint(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}

/// Number of standard Young tableaux of shape lambda, by the requested
/// formula. All four methods agree; `Paths` is the brute-force oracle.
pub fn dim(lambda: &Partition, method: DimMethod) -> BigUint {
    match method {
        DimMethod::Hook => dim_hook(lambda),
        DimMethod::Determinant => dim_determinant(lambda),
        DimMethod::Frobenius => dim_frobenius(lambda),
        DimMethod::Paths => {
            let mut memo = HashMap::new();
            dim_paths(lambda, &mut memo)
        }
    }
}

fn dim_hook(lambda: &Partition) -> BigUint {
    let n = lambda.size();
    let mut num = factorial_biguint(n);
    let t = lambda.transpose();
    for (i, &p) in lambda.parts().iter().enumerate() {
        for j in 1..=p {
            let arm = p - j;
            let leg = t.part(j as usize) - (i as u64 + 1);
            num /= BigUint::from(arm + leg + 1);
        }
    }
    num
}

// dim/n! = prod_{i<j<=l}(l_i - l_j) / prod_i l_i! with l_i = lambda_i + l - i.
fn dim_determinant(lambda: &Partition) -> BigUint {
    let l = lambda.len();
    if l == 0 {
        return BigUint::one();
    }
    let ell: Vec<u64> = (1..=l).map(|i| lambda.part(i) + (l - i) as u64).collect();
    let mut num = factorial_biguint(lambda.size());
    for i in 0..l {
        for j in (i + 1)..l {
            num *= BigUint::from(ell[i] - ell[j]);
        }
    }
    let mut den = BigUint::one();
    for &e in &ell {
        den *= factorial_biguint(e);
    }
    num / den
}

// dim/n! in Frobenius coordinates: prod_{i<j}(p_i-p_j)(q_i-q_j) over
// prod_{i,j}(p_i+q_j+1) * prod_i p_i! q_i!.
fn dim_frobenius(lambda: &Partition) -> BigUint {
    if lambda.is_empty() {
        return BigUint::one();
    }
    let fc = lambda.frobenius();
    let d = fc.d();
    let mut num = factorial_biguint(lambda.size());
    for i in 0..d {
        for j in (i + 1)..d {
            num *= BigUint::from(fc.p[i] - fc.p[j]);
            num *= BigUint::from(fc.q[i] - fc.q[j]);
        }
    }
    let mut den = BigUint::one();
    for i in 0..d {
        for j in 0..d {
            den *= BigUint::from(fc.p[i] + fc.q[j] + 1);
        }
        den *= factorial_biguint(fc.p[i]);
        den *= factorial_biguint(fc.q[i]);
    }
    num / den
}

fn dim_paths(lambda: &Partition, memo: &mut HashMap<Partition, BigUint>) -> BigUint {
    if lambda.is_empty() {
        return BigUint::one();
    }
    if let Some(v) = memo.get(lambda) {
        return v.clone();
    }
    let mut acc = BigUint::zero();
    for mu in lambda.remove_boxes() {
        acc += dim_paths(&mu, memo);
    }
    memo.insert(lambda.clone(), acc.clone());
    acc
}

/// Kingman edge multiplicity kappa_0(mu, lambda): the multiplicity in
/// lambda of the part that was augmented.
pub fn kingman_multiplicity(mu: &Partition, lambda: &Partition) -> Result<u64, PartitionError> {
    if !lambda.remove_boxes().contains(mu) {
        return Err(PartitionError::NotAnEdge(
            lambda.parts().to_vec(),
            mu.parts().to_vec(),
        ));
    }
    // The augmented part is the unique k with r_k(lambda) = r_k(mu) + 1.
    let rm = mu.exponential_form().multiplicities;
    let rl = lambda.exponential_form().multiplicities;
    for (&k, &r) in &rl {
        if r == rm.get(&k).copied().unwrap_or(0) + 1 {
            return Ok(r);
        }
    }
    unreachable!("cover relation guarantees an augmented part");
}

/// Path count in the Kingman graph (edge multiplicities counted).
pub fn dim0(lambda: &Partition, method: Dim0Method) -> BigUint {
    match method {
        Dim0Method::ClosedForm => {
            // n! / prod lambda_i!
            let mut num = factorial_biguint(lambda.size());
            for &p in lambda.parts() {
                num /= factorial_biguint(p);
            }
            num
        }
        Dim0Method::Recurrence => {
            let mut memo = HashMap::new();
            dim0_rec(lambda, &mut memo)
        }
    }
}

fn dim0_rec(lambda: &Partition, memo: &mut HashMap<Partition, BigUint>) -> BigUint {
    if lambda.is_empty() {
        return BigUint::one();
    }
    if let Some(v) = memo.get(lambda) {
        return v.clone();
    }
    let mut acc = BigUint::zero();
    for mu in lambda.remove_boxes() {
        let kappa = kingman_multiplicity(&mu, lambda).expect("cover");
        acc += dim0_rec(&mu, memo) * BigUint::from(kappa);
    }
    memo.insert(lambda.clone(), acc.clone());
    acc
}

/// All partitions of n, in lexicographically decreasing order.
pub fn partitions_of(n: u64) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: u64, max_part: u64, current: &mut Vec<u64>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: current.clone(),
            });
            return;
        }
        let mut k = remaining.min(max_part);
        while k >= 1 {
            current.push(k);
            rec(remaining - k, k, current, out);
            current.pop();
            k -= 1;
        }
    }
    rec(n, n, &mut current, &mut out);
    out
}

/// A point of the Thoma simplex: alpha and beta weakly decreasing and
/// nonnegative, gamma >= 0, total mass one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThomaPoint {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: f64,
}

impl ThomaPoint {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: f64) -> Result<Self, PartitionError> {
        let ordered = |v: &[f64]| v.windows(2).all(|w| w[0] >= w[1]) && v.iter().all(|&x| x >= 0.0);
        if !ordered(&alpha) || !ordered(&beta) || gamma < -1e-12 {
            return Err(PartitionError::InvalidSimplexPoint(
                "coordinates must be ordered and nonnegative".into(),
            ));
        }
        let total: f64 = alpha.iter().sum::<f64>() + beta.iter().sum::<f64>() + gamma;
        if (total - 1.0).abs() > 1e-12 {
            return Err(PartitionError::InvalidSimplexPoint(format!(
                "coordinates sum to {total}, expected 1"
            )));
        }
        Ok(ThomaPoint { alpha, beta, gamma })
    }
}

/// Extended power sum at a Thoma point: p~_1 = 1 identically and
/// p~_n = sum alpha_i^n + (-1)^(n-1) sum beta_i^n for n >= 2.
pub fn extended_power_sum(omega: &ThomaPoint, n: u64) -> f64 {
    assert!(n >= 1);
    if n == 1 {
        return 1.0;
    }
    let a: f64 = omega.alpha.iter().map(|x| x.powi(n as i32)).sum();
    let b: f64 = omega.beta.iter().map(|x| x.powi(n as i32)).sum();
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    a + sign * b
}
