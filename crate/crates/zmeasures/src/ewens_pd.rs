//! Ewens partition structures on the Kingman graph and the parallel
//! Poisson-Dirichlet theory: exact weights and coherence, controlling
//! measures through two independent moment routes, Watterson correlation
//! functions, and PD(t) / Chinese-restaurant samplers.
//!
//! The moment routes mirror the z-measure pair: a coefficient sum over
//! partitions (monomial expansion of products of power sums) and a sum of
//! Dirichlet-measure components over set partitions. Their exact agreement
//! in rational mode is the main check of the module.

use crate::density::MomentSpec;
use crate::partitions::{
    dim0, kingman_multiplicity, partitions_of, Dim0Method, Partition, PartitionError, ThomaPoint,
};
use crate::sampling::RngSeed;
use crate::scalar::{factorial, pochhammer, Scalar};
use crate::zmeasure::VerifyReport;
use num_bigint::{BigInt, BigUint};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EwensError {
    #[error("parameter t must be positive, got {0}")]
    NonPositiveT(f64),
    #[error("exponent list and partition sizes do not match: {0}")]
    SizeMismatch(String),
    #[error("nonpositive coordinate {0} in a correlation point")]
    NonPositiveCoordinate(f64),
    #[error("set-partition enumeration capped at n <= {cap}, requested n = {n}")]
    EnumerationCap { n: usize, cap: usize },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Bell-number growth makes set-partition enumeration the cost driver of
/// the dual moment routes; Bell(10) = 115975 keeps them comfortably fast.
pub const SET_PARTITION_CAP: usize = 10;

/// The single parameter t > 0 of an Ewens partition structure, in either
/// evaluation mode.
#[derive(Debug, Clone, PartialEq)]
pub struct EwensParams<S: Scalar> {
    pub t: S,
}

impl<S: Scalar> EwensParams<S> {
    pub fn new(t: S) -> Result<Self, EwensError> {
        let approx = t.approx_f64();
        if !(approx > 0.0) || (t.abs_f64() - approx).abs() > 1e-12 * approx.max(1.0) {
            return Err(EwensError::NonPositiveT(approx));
        }
        Ok(EwensParams { t })
    }
}

/// A partition of {0, ..., n-1} into disjoint nonempty blocks. Blocks are
/// kept sorted by least element, so the representation is canonical for
/// the unordered partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn ground_size(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }
}

/// All set partitions of {0, ..., n-1}, enumerated through restricted
/// growth strings (the i-th element joins block s[i], with s[i] at most
/// one past the maximum seen so far).
pub fn set_partitions(n: usize) -> Result<Vec<SetPartition>, EwensError> {
    if n > SET_PARTITION_CAP {
        return Err(EwensError::EnumerationCap {
            n,
            cap: SET_PARTITION_CAP,
        });
    }
    let mut out = Vec::new();
    let mut s = vec![0usize; n];
    fn rec(s: &mut Vec<usize>, i: usize, max_used: usize, out: &mut Vec<SetPartition>) {
        let n = s.len();
        if i == n {
            let blocks_n = if n == 0 { 0 } else { max_used + 1 };
            let mut blocks = vec![Vec::new(); blocks_n];
            for (j, &b) in s.iter().enumerate() {
                blocks[b].push(j);
            }
            out.push(SetPartition { blocks });
            return;
        }
        for b in 0..=(if i == 0 { 0 } else { max_used + 1 }) {
            s[i] = b;
            rec(s, i + 1, max_used.max(b), out);
        }
    }
    if n == 0 {
        out.push(SetPartition { blocks: Vec::new() });
    } else {
        rec(&mut s, 0, 0, &mut out);
    }
    Ok(out)
}

/// The Ewens weight M_n(lambda) = t^len(lambda) n! / ((t)_n z_lambda) of a
/// partition of n, where z_lambda = prod_i lambda_i * prod_k r_k!.
pub fn ewens_weight<S: Scalar>(lambda: &Partition, params: &EwensParams<S>) -> S {
    let n = lambda.size();
    let t_pow = pochhammer_like_power(&params.t, lambda.len() as u64);
    let z = S::from_bigint(&BigInt::from(lambda.z_lambda()));
    t_pow * factorial::<S>(n) / (pochhammer(&params.t, n) * z)
}

fn pochhammer_like_power<S: Scalar>(t: &S, k: u64) -> S {
    let mut acc = S::one();
    for _ in 0..k {
        acc = acc * t.clone();
    }
    acc
}

/// Check M_n(mu) = sum over lambda covering mu in the Kingman graph of
/// (dim0(mu) kappa0(mu, lambda) / dim0(lambda)) M_(n+1)(lambda) for every
/// mu of size n, plus normalization. Violations are exactly zero in
/// rational mode.
pub fn verify_kingman_coherence<S: Scalar>(
    n: u64,
    params: &EwensParams<S>,
    tol: f64,
) -> VerifyReport {
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
        let m_mu = ewens_weight(&mu, params);
        let dim0_mu = S::from_bigint(&BigInt::from(dim0(&mu, Dim0Method::ClosedForm)));
        let mut rhs = S::zero();
        for lam in mu.add_boxes() {
            let kappa = kingman_multiplicity(&mu, &lam).expect("cover relation");
            let dim0_lam = S::from_bigint(&BigInt::from(dim0(&lam, Dim0Method::ClosedForm)));
            rhs = rhs
                + dim0_mu.clone() * S::from_int(kappa as i64) / dim0_lam
                    * ewens_weight(&lam, params);
        }
        track(&(m_mu - rhs), format!("Kingman coherence at {:?}", mu.parts()));
    }

    let total: S = partitions_of(n)
        .iter()
        .map(|lam| ewens_weight(lam, params))
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

/// The coefficient of the monomial symmetric function m_lambda in the
/// product p_(l_1+1) ... p_(l_n+1) of power sums: the number of ordered
/// set partitions (pi_1, ..., pi_r) of {1, ..., n}, r = len(lambda), with
/// sum over j in pi_i of (l_j + 1) equal to lambda_i for every i.
pub fn monomial_coefficient(l: &[u64], lambda: &Partition) -> Result<BigUint, EwensError> {
    let n = l.len();
    let total: u64 = l.iter().sum::<u64>() + n as u64;
    if total != lambda.size() {
        return Err(EwensError::SizeMismatch(format!(
            "sum(l_i + 1) = {total} but |lambda| = {}",
            lambda.size()
        )));
    }
    let r = lambda.len();
    if r > n {
        return Ok(BigUint::from(0u32));
    }
    // Assign each index to one of the r blocks, tracking remaining
    // capacity lambda_i minus the partial block sum.
    let mut remaining: Vec<u64> = lambda.parts().to_vec();
    fn rec(l: &[u64], j: usize, remaining: &mut Vec<u64>, count: &mut u64) {
        if j == l.len() {
            if remaining.iter().all(|&c| c == 0) {
                *count += 1;
            }
            return;
        }
        let w = l[j] + 1;
        for i in 0..remaining.len() {
            if remaining[i] >= w {
                remaining[i] -= w;
                rec(l, j + 1, remaining, count);
                remaining[i] += w;
            }
        }
    }
    let mut count = 0u64;
    rec(l, 0, &mut remaining, &mut count);
    Ok(BigUint::from(count))
}

/// Evaluation route for moments of the n-th Ewens controlling measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EwensMomentRoute {
    /// Coefficient sum over partitions of |l| + n with at most n parts.
    CoefficientSum,
    /// Dirichlet-component sum over set partitions of {1, ..., n}.
    ComponentSum,
}

/// Mixed moment of the n-th controlling measure of the Ewens structure:
/// integral of x_1^(l_1) ... x_n^(l_n) over the cube.
pub fn sigma_t_n_moment<S: Scalar>(
    spec: &MomentSpec,
    params: &EwensParams<S>,
    route: EwensMomentRoute,
) -> Result<S, EwensError> {
    let l = spec.exponents();
    match route {
        EwensMomentRoute::CoefficientSum => {
            let size = spec.partition_size();
            let mut acc = S::zero();
            for lam in partitions_of(size) {
                if lam.len() > l.len() {
                    continue;
                }
                let coeff = monomial_coefficient(l, &lam)?;
                if coeff == BigUint::from(0u32) {
                    continue;
                }
                let d0 = S::from_bigint(&BigInt::from(dim0(&lam, Dim0Method::ClosedForm)));
                acc = acc
                    + S::from_bigint(&BigInt::from(coeff)) * ewens_weight(&lam, params) / d0;
            }
            Ok(acc)
        }
        EwensMomentRoute::ComponentSum => {
            let mut acc = S::zero();
            for pi in set_partitions(l.len())? {
                acc = acc + component_moment(&pi, l, params);
            }
            Ok(acc)
        }
    }
}

/// Moment of one Dirichlet component of the controlling measure: for a
/// set partition pi with blocks pi_1, ..., pi_r and block exponent sums
/// m_i = sum over j in pi_i of l_j,
///   t^r prod_i (m_i + |pi_i| - 1)! / (t)_(|l| + n).
pub fn component_moment<S: Scalar>(pi: &SetPartition, l: &[u64], params: &EwensParams<S>) -> S {
    let total: u64 = l.iter().sum::<u64>() + l.len() as u64;
    let mut num = pochhammer_like_power(&params.t, pi.num_blocks() as u64);
    for block in pi.blocks() {
        let m: u64 = block.iter().map(|&j| l[j]).sum();
        num = num * factorial::<S>(m + block.len() as u64 - 1);
    }
    num / pochhammer(&params.t, total)
}

/// Watterson's correlation function of the Poisson-Dirichlet process:
/// rho_n(x_1, ..., x_n) = t^n (1 - sum x_i)_+^(t-1) / prod x_i.
pub fn watterson_rho(x: &[f64], t: f64) -> Result<f64, EwensError> {
    if !(t > 0.0) {
        return Err(EwensError::NonPositiveT(t));
    }
    for &xi in x {
        if xi <= 0.0 {
            return Err(EwensError::NonPositiveCoordinate(xi));
        }
    }
    let s: f64 = x.iter().sum();
    if s >= 1.0 {
        return Ok(0.0);
    }
    let prod: f64 = x.iter().product();
    Ok(t.powi(x.len() as i32) * (1.0 - s).powf(t - 1.0) / prod)
}

/// Default stick count for [`sample_pd`]: enough sticks that the expected
/// residual mass (1 - E[V])^k = (t/(t+1))^k falls below 1e-12.
pub fn default_pd_truncation(t: f64) -> usize {
    (10.0 * t.max(1.0) * (1e12f64).ln()).ceil() as usize
}

/// A PD(t) sample by stick-breaking: V_i iid Beta(1, t), alpha_i =
/// V_i prod_(j<i) (1 - V_j), sorted decreasing. The unallocated residual
/// mass is returned in the gamma coordinate; beta is empty.
pub fn sample_pd(t: f64, truncation: usize, seed: RngSeed) -> Result<ThomaPoint, EwensError> {
    let mut rng = seed.rng();
    sample_pd_with(t, truncation, &mut rng)
}

/// As [`sample_pd`] but drawing from a caller-owned generator, for
/// repeated sampling.
pub fn sample_pd_with(
    t: f64,
    truncation: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ThomaPoint, EwensError> {
    if !(t > 0.0) {
        return Err(EwensError::NonPositiveT(t));
    }
    let mut alpha = Vec::with_capacity(truncation);
    let mut stick = 1.0f64;
    for _ in 0..truncation {
        // V ~ Beta(1, t) by inversion: V = 1 - U^(1/t).
        let u: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
        let v = 1.0 - u.powf(1.0 / t);
        alpha.push(stick * v);
        stick *= 1.0 - v;
        if stick < 1e-15 {
            break;
        }
    }
    alpha.sort_by(|a, b| b.partial_cmp(a).unwrap());
    while alpha.last().copied() == Some(0.0) {
        alpha.pop();
    }
    Ok(ThomaPoint::new(alpha, Vec::new(), stick)?)
}

/// An Ewens(t) partition of n by the Chinese-restaurant construction:
/// element k + 1 joins an existing block of size b with probability
/// b / (k + t) and opens a new block with probability t / (k + t). The
/// resulting partition law is exactly M_n.
pub fn sample_ewens(n: u64, t: f64, seed: RngSeed) -> Result<Partition, EwensError> {
    let mut rng = seed.rng();
    sample_ewens_with(n, t, &mut rng)
}

/// As [`sample_ewens`] but drawing from a caller-owned generator.
pub fn sample_ewens_with(
    n: u64,
    t: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Partition, EwensError> {
    if !(t > 0.0) {
        return Err(EwensError::NonPositiveT(t));
    }
    let mut blocks: Vec<u64> = Vec::new();
    for k in 0..n {
        let total = k as f64 + t;
        let u: f64 = rng.gen::<f64>() * total;
        // Walk the existing blocks; the trailing new-block bucket absorbs
        // any rounding remainder.
        let mut acc = 0.0f64;
        let mut joined = false;
        for b in blocks.iter_mut() {
            acc += *b as f64;
            if u < acc {
                *b += 1;
                joined = true;
                break;
            }
        }
        if !joined {
            blocks.push(1);
        }
    }
    blocks.sort_unstable_by(|a, b| b.cmp(a));
    Ok(Partition::new(blocks)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quad_endpoint;
    use num_complex::Complex64;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn p(parts: &[u64]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn et(n: i64, d: i64) -> EwensParams<BigRational> {
        EwensParams::new(rat(n, d)).unwrap()
    }

    #[test]
    fn weight_examples() {
        // M((2)) = 1/(t+1), M((1,1)) = t/(t+1) at t = 1/2: 2/3 and 1/3.
        let prm = et(1, 2);
        assert_eq!(ewens_weight(&p(&[2]), &prm), rat(2, 3));
        assert_eq!(ewens_weight(&p(&[1, 1]), &prm), rat(1, 3));
        assert_eq!(ewens_weight(&p(&[1]), &prm), rat(1, 1));
    }

    #[test]
    fn t_one_is_uniform_permutation_cycle_law() {
        // At t = 1 the weight reduces to 1/z_lambda, the cycle-type law of
        // a uniform permutation; verify against brute-force enumeration.
        let prm = et(1, 1);
        for n in 1..=6u64 {
            let mut counts: std::collections::HashMap<Vec<u64>, u64> =
                std::collections::HashMap::new();
            let mut perm: Vec<usize> = (0..n as usize).collect();
            permute_all(&mut perm, 0, &mut |q| {
                *counts.entry(cycle_type(q)).or_insert(0) += 1;
            });
            let total: u64 = (1..=n).product();
            for lam in partitions_of(n) {
                let freq = rat(counts[lam.parts()] as i64, total as i64);
                assert_eq!(ewens_weight(&lam, &prm), freq, "n={n}, {:?}", lam.parts());
            }
        }
    }

    fn permute_all(v: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
        if i == v.len() {
            f(v);
            return;
        }
        for j in i..v.len() {
            v.swap(i, j);
            permute_all(v, i + 1, f);
            v.swap(i, j);
        }
    }

    fn cycle_type(perm: &[usize]) -> Vec<u64> {
        let n = perm.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = perm[k];
                len += 1;
            }
            cycles.push(len);
        }
        cycles.sort_unstable_by(|a, b| b.cmp(a));
        cycles
    }

    #[test]
    fn weights_sum_to_one() {
        for params in [et(1, 2), et(3, 1), et(7, 5)] {
            for n in 0..=10u64 {
                let total: BigRational = partitions_of(n)
                    .iter()
                    .map(|lam| ewens_weight(lam, &params))
                    .fold(rat(0, 1), |a, b| a + b);
                assert_eq!(total, rat(1, 1), "t={:?}, n={n}", params.t);
            }
        }
    }

    #[test]
    fn kingman_coherence_exact() {
        let prm = et(1, 2);
        for n in 0..=8u64 {
            let report = verify_kingman_coherence(n, &prm, 0.0);
            assert!(report.pass && report.exact, "n={n}: {report:?}");
        }
    }

    #[test]
    fn monomial_coefficients() {
        // p_(l+1) = m_((l+1)) for a single factor.
        assert_eq!(
            monomial_coefficient(&[3], &p(&[4])).unwrap(),
            BigUint::from(1u32)
        );
        assert_eq!(
            monomial_coefficient(&[3], &p(&[3, 1])).unwrap(),
            BigUint::from(0u32)
        );
        // p_1 p_1 = m_(2) + 2 m_(1,1).
        assert_eq!(
            monomial_coefficient(&[0, 0], &p(&[1, 1])).unwrap(),
            BigUint::from(2u32)
        );
        assert_eq!(
            monomial_coefficient(&[0, 0], &p(&[2])).unwrap(),
            BigUint::from(1u32)
        );
        // p_2 p_1 = m_(3) + m_(2,1).
        assert_eq!(
            monomial_coefficient(&[1, 0], &p(&[2, 1])).unwrap(),
            BigUint::from(1u32)
        );
        assert_eq!(
            monomial_coefficient(&[1, 0], &p(&[3])).unwrap(),
            BigUint::from(1u32)
        );
        assert!(monomial_coefficient(&[1, 0], &p(&[2, 2])).is_err());
    }

    #[test]
    fn moment_routes_agree_exactly() {
        for params in [et(1, 2), et(3, 1)] {
            for l in [
                vec![0u64],
                vec![4],
                vec![0, 0],
                vec![2, 1],
                vec![4, 4],
                vec![0, 0, 0],
                vec![1, 2, 3],
                vec![4, 4, 4],
            ] {
                let spec = MomentSpec::new(l.clone()).unwrap();
                let a =
                    sigma_t_n_moment(&spec, &params, EwensMomentRoute::CoefficientSum).unwrap();
                let b =
                    sigma_t_n_moment(&spec, &params, EwensMomentRoute::ComponentSum).unwrap();
                assert_eq!(a, b, "t={:?}, l={l:?}", params.t);
            }
        }
    }

    #[test]
    fn n1_moment_closed_form_and_beta_integral() {
        // sigma_1 = t (1-x)^(t-1) dx: the l-th moment is t l! / (t)_(l+1).
        let prm = et(1, 2);
        for l in 0..=5u64 {
            let spec = MomentSpec::new(vec![l]).unwrap();
            let m = sigma_t_n_moment(&spec, &prm, EwensMomentRoute::CoefficientSum).unwrap();
            let closed = rat(1, 2) * factorial::<BigRational>(l)
                / pochhammer(&rat(1, 2), l + 1);
            assert_eq!(m, closed);
        }
        // Quadrature cross-check of the same density at t = 1/2, l = 3.
        let t = 0.5f64;
        let quad = quad_endpoint(
            |x: f64, _dlo: f64, dhi: f64| {
                Complex64::new(t * x.powi(3) * dhi.powf(t - 1.0), 0.0)
            },
            0.0,
            1.0,
            (0.0, t - 1.0),
            1e-11,
        )
        .unwrap();
        let spec = MomentSpec::new(vec![3]).unwrap();
        let exact = sigma_t_n_moment(&spec, &prm, EwensMomentRoute::ComponentSum)
            .unwrap()
            .approx_f64();
        assert!((quad.re - exact).abs() < 1e-10, "{quad} vs {exact}");
    }

    #[test]
    fn diagonal_component_is_y_sigma1() {
        // The diagonal component of sigma_2 equals y sigma_1(dy),
        // so its (l1, l2) moment is the (l1 + l2 + 1)-th sigma_1 moment.
        let prm = et(2, 3);
        let diag = SetPartition {
            blocks: vec![vec![0, 1]],
        };
        for (l1, l2) in [(0u64, 0u64), (1, 0), (2, 3), (4, 4)] {
            let lhs = component_moment(&diag, &[l1, l2], &prm);
            let spec = MomentSpec::new(vec![l1 + l2 + 1]).unwrap();
            let rhs = sigma_t_n_moment(&spec, &prm, EwensMomentRoute::ComponentSum).unwrap();
            assert_eq!(lhs, rhs, "l = ({l1}, {l2})");
        }
    }

    #[test]
    fn n3_component_structure() {
        // For n = 3 there are 1 + 3 + 1 set partitions by block count, and
        // the component for {1} | {2,3} at t = 2, l = (1,0,0) integrates
        // t^2 x1 x2 (1 - x1 - x2)^(t-1) over the simplex: 4/120 = 1/30.
        let pis = set_partitions(3).unwrap();
        let mut by_r = [0usize; 4];
        for pi in &pis {
            by_r[pi.num_blocks()] += 1;
        }
        assert_eq!(by_r, [0, 1, 3, 1]);

        let prm = et(2, 1);
        let pi = pis
            .iter()
            .find(|pi| pi.blocks() == [vec![0], vec![1, 2]])
            .unwrap();
        assert_eq!(component_moment(pi, &[1, 0, 0], &prm), rat(1, 30));
    }

    #[test]
    fn component_matches_watterson_quadrature() {
        // Prop 4.4 accordance at n = 2: the discrete (two-block) component
        // has density rho_2(y1, y2) y1 y2 with rho_2 Watterson's function;
        // check one moment by nested quadrature at t = 2.
        let t = 2.0f64;
        let prm = et(2, 1);
        let pi = SetPartition {
            blocks: vec![vec![0], vec![1]],
        };
        let (l1, l2) = (1u64, 2u64);
        let exact = component_moment(&pi, &[l1, l2], &prm).approx_f64();
        let outer = quad_endpoint(
            |y1: f64, _d0: f64, d1: f64| {
                // d1 = 1 - y1; inner integral over y2 in (0, 1 - y1).
                let inner = quad_endpoint(
                    |y2: f64, _e0: f64, e1: f64| {
                        // e1 = (1 - y1) - y2 is the stable simplex distance.
                        let rho = t * t * e1.powf(t - 1.0) / (y1 * y2);
                        Complex64::new(y1.powi(1 + l1 as i32) * y2.powi(1 + l2 as i32) * rho, 0.0)
                    },
                    0.0,
                    d1,
                    (l2 as f64, t - 1.0),
                    1e-11,
                )
                .unwrap();
                inner
            },
            0.0,
            1.0,
            (l1 as f64, t),
            1e-10,
        )
        .unwrap();
        assert!((outer.re - exact).abs() < 1e-8, "{outer} vs {exact}");
    }

    #[test]
    fn watterson_examples() {
        assert!((watterson_rho(&[0.25], 1.0).unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(watterson_rho(&[0.6, 0.5], 2.0).unwrap(), 0.0);
        let v = watterson_rho(&[0.2, 0.3], 2.0).unwrap();
        assert!((v - 4.0 * 0.5 / 0.06).abs() < 1e-12, "{v}");
        assert!(watterson_rho(&[-0.1], 1.0).is_err());
    }

    #[test]
    fn pd_sampler_reproducible_and_normalized() {
        let a = sample_pd(1.0, default_pd_truncation(1.0), RngSeed(11)).unwrap();
        let b = sample_pd(1.0, default_pd_truncation(1.0), RngSeed(11)).unwrap();
        assert_eq!(a.alpha, b.alpha);
        let mass: f64 = a.alpha.iter().sum::<f64>() + a.gamma;
        assert!((mass - 1.0).abs() < 1e-12);
        assert!(a.gamma < 1e-12);
        assert!(a.alpha.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn pd_largest_part_mean() {
        // E[alpha_1] for PD(1) is 0.6243...; 3-sigma band over 20000
        // samples (per-sample sd is about 0.19).
        let mut rng = RngSeed(20_240_817).rng();
        let trunc = default_pd_truncation(1.0);
        let samples = 20_000usize;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..samples {
            let a1 = sample_pd_with(1.0, trunc, &mut rng).unwrap().alpha[0];
            sum += a1;
            sumsq += a1 * a1;
        }
        let mean = sum / samples as f64;
        let sd = ((sumsq / samples as f64 - mean * mean) / samples as f64).sqrt();
        assert!(
            (mean - 0.6243).abs() < 3.0 * sd + 1e-3,
            "mean = {mean}, stderr = {sd}"
        );
    }

    #[test]
    fn pd_first_correlation_matches_watterson() {
        // Empirical first-correlation histogram of PD(1/2) against
        // rho_1(x) = t (1-x)^(t-1) / x, 3 sigma per bin.
        let t = 0.5f64;
        let mut rng = RngSeed(7).rng();
        let trunc = default_pd_truncation(t);
        let samples = 20_000usize;
        let bins = 9usize;
        let lo = 0.05f64;
        let hi = 0.95f64;
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0.0f64; bins];
        let mut sq = vec![0.0f64; bins];
        for _ in 0..samples {
            let omega = sample_pd_with(t, trunc, &mut rng).unwrap();
            let mut per = vec![0.0f64; bins];
            for &a in &omega.alpha {
                if a >= lo && a < hi {
                    per[((a - lo) / width) as usize] += 1.0;
                }
            }
            for i in 0..bins {
                counts[i] += per[i];
                sq[i] += per[i] * per[i];
            }
        }
        for i in 0..bins {
            let mean = counts[i] / samples as f64;
            let var = (sq[i] / samples as f64 - mean * mean).max(0.0);
            let stderr = (var / samples as f64).sqrt();
            let est = mean / width;
            let x0 = lo + i as f64 * width;
            // Bin average of rho_1 (the density varies like 1/x across a
            // bin, so the midpoint value is not the right comparison).
            let expect = quad_endpoint(
                |x: f64, _d0: f64, _d1: f64| {
                    Complex64::new(watterson_rho(&[x], t).unwrap(), 0.0)
                },
                x0,
                x0 + width,
                (0.0, 0.0),
                1e-10,
            )
            .unwrap()
            .re
                / width;
            assert!(
                (est - expect).abs() <= 3.0 * stderr / width + 1e-9,
                "bin {i} at x={x0}: {est} vs {expect} (stderr {stderr})"
            );
        }
    }

    #[test]
    fn ewens_sampler_matches_weights() {
        assert_eq!(
            sample_ewens(1, 2.0, RngSeed(1)).unwrap(),
            p(&[1])
        );
        // n = 2, t = 1: P((2)) = 1/2.
        let mut rng = RngSeed(42).rng();
        let samples = 40_000usize;
        let mut two = 0usize;
        for _ in 0..samples {
            if sample_ewens_with(2, 1.0, &mut rng).unwrap() == p(&[2]) {
                two += 1;
            }
        }
        let freq = two as f64 / samples as f64;
        let sigma = (0.25f64 / samples as f64).sqrt();
        assert!((freq - 0.5).abs() < 3.0 * sigma, "freq = {freq}");

        // n = 6, t = 1/2: all 11 partitions within 3 sigma.
        let prm = et(1, 2);
        let mut rng = RngSeed(99).rng();
        let samples = 100_000usize;
        let mut counts: std::collections::HashMap<Vec<u64>, usize> =
            std::collections::HashMap::new();
        for _ in 0..samples {
            let lam = sample_ewens_with(6, 0.5, &mut rng).unwrap();
            *counts.entry(lam.parts().to_vec()).or_insert(0) += 1;
        }
        for lam in partitions_of(6) {
            let prob = ewens_weight(&lam, &prm).approx_f64();
            let freq = *counts.get(lam.parts()).unwrap_or(&0) as f64 / samples as f64;
            let sigma = (prob * (1.0 - prob) / samples as f64).sqrt();
            assert!(
                (freq - prob).abs() < 3.0 * sigma + 1e-4,
                "{:?}: {freq} vs {prob}",
                lam.parts()
            );
        }
    }

    #[test]
    fn set_partition_counts_are_bell_numbers() {
        let bell = [1usize, 1, 2, 5, 15, 52, 203, 877];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(n).unwrap().len(), b, "n={n}");
        }
        assert!(set_partitions(11).is_err());
    }
}
