//! Sequential growth sampling of random Young diagrams whose marginal
//! law at level n is exactly the z-measure, embedding of diagrams into
//! point configurations via scaled Frobenius coordinates, and empirical
//! density estimation.

use crate::partitions::{dim, DimMethod, Partition};
use crate::scalar::Scalar;
use crate::zmeasure::{weight, WeightMethod, ZParams};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("no samples provided")]
    EmptySamples,
    #[error("bins must be strictly increasing, away from 0")]
    BadBins,
    #[error("|lambda| = {0} does not match n = {1}")]
    SizeMismatch(u64, u64),
}

/// A point configuration in [-1, 1] \ {0}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Configuration {
    pub points: Vec<f64>,
}

/// Seed wrapper; identical seeds give identical sample streams. The
/// generator is ChaCha8, one draw per growth step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Transition probabilities of the growth chain from mu to each diagram
/// in add_boxes(mu): Prob(mu -> lambda) = (dim mu / dim lambda)
/// * M_(n+1)(lambda) / M_n(mu). Nonnegative and summing to one exactly
/// in rational mode, by coherence.
pub fn up_transition<S: Scalar>(mu: &Partition, params: &ZParams<S>) -> Vec<(Partition, S)> {
    let m_mu = weight(mu, params, WeightMethod::Boxes);
    let dim_mu = S::from_bigint(&dim(mu, DimMethod::Hook).into());
    mu.add_boxes()
        .into_iter()
        .map(|lam| {
            let m_lam = weight(&lam, params, WeightMethod::Boxes);
            let dim_lam = S::from_bigint(&dim(&lam, DimMethod::Hook).into());
            let p = dim_mu.clone() * m_lam / (dim_lam * m_mu.clone());
            (lam, p)
        })
        .collect()
}

/// Draw one partition of n with marginal law exactly M_n, by running the
/// growth chain from the empty diagram. One uniform draw per growth
/// step; cumulative-sum inversion with the final bucket absorbing
/// floating-point remainder.
///
/// The chain uses incremental f64 transition weights:
/// Prob(mu -> mu + box at (i, j)) is proportional to
/// (z + c)(z' + c) * dim(lambda)/dim(mu), with c = j - i the content of
/// the new box, and the dimension ratio computed from the hook lengths
/// of the affected row and column only, so each step costs O(|mu|)
/// rather than a full re-evaluation.
pub fn sample_partition(n: u64, params: &ZParams<Complex64>, seed: RngSeed) -> Partition {
    let mut rng = seed.rng();
    sample_partition_with(n, params, &mut rng)
}

/// As [`sample_partition`], reusing a caller-owned generator so chains
/// can draw successive samples from one stream.
pub fn sample_partition_with(n: u64, params: &ZParams<Complex64>, rng: &mut ChaCha8Rng) -> Partition {
    let mut parts: Vec<u64> = Vec::new();
    for _m in 0..n {
        let choices = growth_weights(&parts, params);
        let total: f64 = choices.iter().map(|(_, w)| w).sum();
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = choices.len() - 1; // final bucket absorbs rounding
        for (idx, (_, w)) in choices.iter().enumerate() {
            acc += w;
            if u < acc {
                chosen = idx;
                break;
            }
        }
        let row = choices[chosen].0;
        if row == parts.len() {
            parts.push(1);
        } else {
            parts[row] += 1;
        }
    }
    Partition::new(parts).expect("growth keeps parts weakly decreasing")
}

/// Unnormalized transition weights for adding a box to each admissible
/// row (a final entry parts.len() means "start a new row").
fn growth_weights(parts: &[u64], params: &ZParams<Complex64>) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for i in 0..=parts.len() {
        let at_end = i == parts.len();
        if !at_end && i > 0 && parts[i] == parts[i - 1] {
            continue; // would break weak decrease
        }
        if !at_end {
            let j = parts[i]; // new box at row i (0-based), column j (0-based)
            let c = j as f64 - i as f64;
            let zc = (params.z + c) * (params.zp + c);
            let ratio = dim_ratio_after_add(parts, i);
            out.push((i, zc.re.max(0.0) * ratio));
        } else {
            let c = -(i as f64);
            let zc = (params.z + c) * (params.zp + c);
            let ratio = dim_ratio_after_add(parts, i);
            out.push((i, zc.re.max(0.0) * ratio));
        }
    }
    out
}

/// dim(lambda)/dim(mu) when a box is appended to row `row` of mu, where
/// lambda = mu + box. By the hook-length formula the ratio is
/// (n + 1) * prod over affected cells of h_mu / h_lambda; only cells in
/// the same row or column as the new box change their hook length
/// (each by exactly one).
fn dim_ratio_after_add(parts: &[u64], row: usize) -> f64 {
    let n: u64 = parts.iter().sum();
    let new_col = if row == parts.len() { 0 } else { parts[row] as usize };
    // Column lengths: number of rows with parts > column index.
    let col_len = |j: usize| parts.iter().take_while(|&&p| p as usize > j).count();
    let mut ratio = (n + 1) as f64;
    // Cells in the same row, columns 0..new_col.
    if row < parts.len() {
        for j in 0..new_col {
            // Hook in mu at (row, j): arm + leg + 1.
            let arm = parts[row] as usize - j - 1;
            let leg = col_len(j) - row - 1;
            let h = (arm + leg + 1) as f64;
            ratio *= h / (h + 1.0);
        }
    }
    // Cells in the same column, rows 0..row.
    for i in 0..row.min(parts.len()) {
        let arm = parts[i] as usize - new_col - 1;
        let leg = col_len(new_col) - i - 1;
        let h = (arm + leg + 1) as f64;
        ratio *= h / (h + 1.0);
    }
    // The new box itself has hook length 1 in lambda (it is a corner).
    ratio
}

/// Scaled modified Frobenius coordinates of a diagram of size n:
/// (p_i + 1/2)/n for the positive points, -(q_i + 1/2)/n for the
/// negative ones.
pub fn embed_configuration(lambda: &Partition, n: u64) -> Result<Configuration, SamplingError> {
    if lambda.size() != n || n == 0 {
        return Err(SamplingError::SizeMismatch(lambda.size(), n));
    }
    let fr = lambda.frobenius();
    let mut points = Vec::with_capacity(2 * fr.p.len());
    for &p in &fr.p {
        points.push((p as f64 + 0.5) / n as f64);
    }
    for &q in &fr.q {
        points.push(-((q as f64 + 0.5) / n as f64));
    }
    Ok(Configuration { points })
}

/// A histogram bin with its density estimate and binomial standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Empirical first-correlation density: mean point counts per bin
/// divided by bin width, with standard errors from the across-sample
/// variance of the per-sample counts.
pub fn empirical_density(
    samples: &[Configuration],
    bin_edges: &[f64],
) -> Result<Vec<HistogramBin>, SamplingError> {
    if samples.is_empty() {
        return Err(SamplingError::EmptySamples);
    }
    if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SamplingError::BadBins);
    }
    let n_bins = bin_edges.len() - 1;
    let n_samples = samples.len() as f64;
    let mut sums = vec![0.0f64; n_bins];
    let mut sq_sums = vec![0.0f64; n_bins];
    for cfg in samples {
        let mut counts = vec![0.0f64; n_bins];
        for &x in &cfg.points {
            if x < bin_edges[0] || x >= bin_edges[n_bins] {
                continue;
            }
            let idx = match bin_edges.binary_search_by(|e| e.partial_cmp(&x).unwrap()) {
                Ok(i) => i.min(n_bins - 1),
                Err(i) => i - 1,
            };
            counts[idx] += 1.0;
        }
        for (b, &c) in counts.iter().enumerate() {
            sums[b] += c;
            sq_sums[b] += c * c;
        }
    }
    Ok((0..n_bins)
        .map(|b| {
            let width = bin_edges[b + 1] - bin_edges[b];
            let mean = sums[b] / n_samples;
            let var = (sq_sums[b] / n_samples - mean * mean).max(0.0);
            HistogramBin {
                lo: bin_edges[b],
                hi: bin_edges[b + 1],
                estimate: mean / width,
                stderr: (var / n_samples).sqrt() / width,
            }
        })
        .collect())
}

/// Enumerate the exact law of the growth chain at level n by summing
/// path products of up_transition probabilities. An oracle for the
/// sampler's marginal-law claim; exponential in n, keep n small.
pub fn enumerate_chain_law<S: Scalar>(n: u64, params: &ZParams<S>) -> Vec<(Partition, S)> {
    let mut level: Vec<(Partition, S)> = vec![(Partition::empty(), S::one())];
    for _ in 0..n {
        let mut next: Vec<(Partition, S)> = Vec::new();
        for (mu, prob) in &level {
            for (lam, p) in up_transition(mu, params) {
                let mass = prob.clone() * p;
                if let Some(entry) = next.iter_mut().find(|(l, _)| *l == lam) {
                    entry.1 = entry.1.clone() + mass;
                } else {
                    next.push((lam, mass));
                }
            }
        }
        level = next;
    }
    level
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::partitions_of;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;
    use std::collections::HashMap;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn params_half() -> ZParams<BigRational> {
        ZParams::rational(rat(1, 2), rat(1, 2)).unwrap()
    }

    #[test]
    fn up_transition_examples() {
        let p = params_half();
        let from_one = up_transition(&Partition::new(vec![1]).unwrap(), &p);
        let mut map: HashMap<Vec<u64>, BigRational> = from_one
            .into_iter()
            .map(|(l, pr)| (l.parts().to_vec(), pr))
            .collect();
        assert_eq!(map.remove(&vec![2]).unwrap(), rat(9, 10));
        assert_eq!(map.remove(&vec![1, 1]).unwrap(), rat(1, 10));
        assert!(map.is_empty());

        let from_empty = up_transition(&Partition::empty(), &p);
        assert_eq!(from_empty.len(), 1);
        assert_eq!(from_empty[0].1, rat(1, 1));
    }

    #[test]
    fn up_transition_sums_to_one() {
        let p = ZParams::rational(rat(1, 2), rat(7, 10)).unwrap();
        for n in 0..=8u64 {
            for mu in partitions_of(n) {
                let total: BigRational = up_transition(&mu, &p)
                    .into_iter()
                    .map(|(_, pr)| pr)
                    .fold(rat(0, 1), |a, b| a + b);
                assert_eq!(total, rat(1, 1), "mu = {mu:?}");
            }
        }
    }

    #[test]
    fn chain_law_is_exact() {
        let p = params_half();
        for n in 0..=4u64 {
            let law = enumerate_chain_law(n, &p);
            for (lam, prob) in law {
                assert_eq!(
                    prob,
                    weight(&lam, &p, WeightMethod::Boxes),
                    "n = {n}, lambda = {lam:?}"
                );
            }
        }
    }

    #[test]
    fn sampler_marginals_match_weights() {
        let p = params_half().to_complex();
        let trials = 100_000;
        let mut rng = RngSeed(20_240_817).rng();
        let mut count_two = 0u64;
        for _ in 0..trials {
            let lam = sample_partition_with(2, &p, &mut rng);
            if lam.parts() == [2] {
                count_two += 1;
            }
        }
        let freq = count_two as f64 / trials as f64;
        let sigma = (0.9f64 * 0.1 / trials as f64).sqrt();
        assert!(
            (freq - 0.9).abs() <= 3.0 * sigma,
            "freq = {freq}, sigma = {sigma}"
        );
    }

    #[test]
    fn sampler_marginals_principal_series() {
        let p = ZParams::complex(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0)).unwrap();
        let trials = 100_000;
        let mut rng = RngSeed(7).rng();
        let mut counts: HashMap<Vec<u64>, u64> = HashMap::new();
        for _ in 0..trials {
            let lam = sample_partition_with(3, &p, &mut rng);
            *counts.entry(lam.parts().to_vec()).or_insert(0) += 1;
        }
        for lam in partitions_of(3) {
            let expect = weight(&lam, &p, WeightMethod::Boxes).re;
            let freq = *counts.get(lam.parts()).unwrap_or(&0) as f64 / trials as f64;
            let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
            assert!(
                (freq - expect).abs() <= 3.0 * sigma.max(1e-6),
                "lambda = {lam:?}: freq = {freq}, expect = {expect}"
            );
        }
    }

    #[test]
    fn sampler_reproducible() {
        let p = params_half().to_complex();
        let a = sample_partition(50, &p, RngSeed(99));
        let b = sample_partition(50, &p, RngSeed(99));
        assert_eq!(a, b);
        let sizes: u64 = a.size();
        assert_eq!(sizes, 50);
    }

    #[test]
    fn dim_ratio_matches_exact() {
        // Cross-check the incremental hook-ratio against exact dims.
        for n in 0..=8u64 {
            for mu in partitions_of(n) {
                let dim_mu = dim(&mu, DimMethod::Hook).to_f64().unwrap();
                for lam in mu.add_boxes() {
                    let row = (0..lam.parts().len())
                        .find(|&i| {
                            mu.parts().get(i).copied().unwrap_or(0) != lam.parts()[i]
                        })
                        .unwrap();
                    let exact = dim(&lam, DimMethod::Hook).to_f64().unwrap() / dim_mu;
                    let fast = dim_ratio_after_add(mu.parts(), row);
                    assert!(
                        (exact - fast).abs() < 1e-9 * exact,
                        "mu = {mu:?}, row = {row}: {exact} vs {fast}"
                    );
                }
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let cfg = embed_configuration(&Partition::new(vec![1]).unwrap(), 1).unwrap();
        assert_eq!(cfg.points, vec![0.5, -0.5]);
        let cfg = embed_configuration(&Partition::new(vec![3, 2]).unwrap(), 5).unwrap();
        assert_eq!(cfg.points, vec![0.5, 0.1, -0.3, -0.1]);
        assert!(matches!(
            embed_configuration(&Partition::new(vec![2]).unwrap(), 3),
            Err(SamplingError::SizeMismatch(2, 3))
        ));
    }

    #[test]
    fn embedding_boundedness() {
        let p = params_half().to_complex();
        let lam = sample_partition(300, &p, RngSeed(5));
        let cfg = embed_configuration(&lam, 300).unwrap();
        let d = lam.diagonal() as f64;
        let total: f64 = cfg.points.iter().map(|x| x.abs()).sum();
        assert!(total <= 1.0 + d / 300.0 + 1e-12);
        for eps in [0.05, 0.1, 0.25] {
            let outside = cfg.points.iter().filter(|x| x.abs() >= eps).count();
            assert!(
                outside as f64 <= (1.0 + d / 300.0) / eps + 1.0,
                "eps = {eps}: {outside} points"
            );
        }
    }

    #[test]
    fn histogram_basics() {
        let empty = Configuration { points: vec![] };
        let bins = [0.1, 0.2, 0.3];
        let h = empirical_density(&[empty], &bins).unwrap();
        assert!(h.iter().all(|b| b.estimate == 0.0 && b.stderr == 0.0));
        assert!(empirical_density(&[], &bins).is_err());
        assert!(matches!(
            empirical_density(&[Configuration { points: vec![] }], &[0.2, 0.1]),
            Err(SamplingError::BadBins)
        ));

        // Two samples, one point each in the first bin: density 1/width.
        let c1 = Configuration { points: vec![0.15] };
        let c2 = Configuration { points: vec![0.15] };
        let h = empirical_density(&[c1, c2], &bins).unwrap();
        assert!((h[0].estimate - 10.0).abs() < 1e-12);
        assert_eq!(h[0].stderr, 0.0);
    }
}
