//! Irreducible symmetric-group character values via the
//! Murnaghan-Nakayama rim-hook recursion.
//!
//! The recursion works on beta-sets (first-column hook lengths): removing
//! a rim hook of length r from lambda corresponds to replacing some beta
//! number b by b - r, with sign (-1)^(number of beta numbers strictly
//! between b - r and b).

use crate::partitions::{Partition, PartitionError};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CharacterError {
    #[error("cycle type sums to {0} but the diagram has {1} boxes")]
    SizeMismatch(u64, u64),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Cycle type rho: cycle lengths >= 1, order irrelevant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleType {
    cycles: Vec<u64>,
}

impl CycleType {
    pub fn new(cycles: Vec<u64>) -> Self {
        assert!(cycles.iter().all(|&c| c >= 1));
        CycleType { cycles }
    }

    pub fn cycles(&self) -> &[u64] {
        &self.cycles
    }

    pub fn total(&self) -> u64 {
        self.cycles.iter().sum()
    }

    pub fn num_cycles(&self) -> usize {
        self.cycles.len()
    }
}

impl From<&Partition> for CycleType {
    fn from(lambda: &Partition) -> Self {
        CycleType::new(lambda.parts().to_vec())
    }
}

/// chi^lambda_rho. Exact, memoized on (beta-set, sorted cycles); the
/// longest cycle is removed first.
pub fn chi(lambda: &Partition, rho: &CycleType) -> Result<BigInt, CharacterError> {
    if rho.total() != lambda.size() {
        return Err(CharacterError::SizeMismatch(rho.total(), lambda.size()));
    }
    let betas: Vec<u64> = {
        let l = lambda.len();
        (1..=l).map(|i| lambda.part(i) + (l - i) as u64).collect()
    };
    let mut cycles = rho.cycles().to_vec();
    cycles.sort_unstable_by(|a, b| b.cmp(a));
    let mut memo = HashMap::new();
    Ok(chi_rec(&betas, &cycles, &mut memo))
}

type Memo = HashMap<(Vec<u64>, Vec<u64>), BigInt>;

fn chi_rec(betas: &[u64], cycles: &[u64], memo: &mut Memo) -> BigInt {
    if cycles.is_empty() {
        return BigInt::one();
    }
    let key = (betas.to_vec(), cycles.to_vec());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let r = cycles[0];
    let rest = &cycles[1..];
    let mut acc = BigInt::zero();
    for (idx, &b) in betas.iter().enumerate() {
        if b < r {
            continue;
        }
        let target = b - r;
        if betas.contains(&target) {
            continue;
        }
        // Strip height = number of beta numbers the moved one jumps over.
        let crossed = betas
            .iter()
            .filter(|&&x| x > target && x < b)
            .count();
        let mut next: Vec<u64> = betas
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, &x)| x)
            .collect();
        next.push(target);
        next.sort_unstable_by(|a, b| b.cmp(a));
        normalize_betas(&mut next);
        let term = chi_rec(&next, rest, memo);
        acc += if crossed % 2 == 0 { term } else { -term };
    }
    memo.insert(key, acc.clone());
    acc
}

// With betas sorted descending, b_l = lambda_l; a trailing zero is an
// empty last row. Dropping it shifts every remaining beta down by one.
fn normalize_betas(betas: &mut Vec<u64>) {
    while betas.last() == Some(&0) {
        betas.pop();
        for b in betas.iter_mut() {
            *b -= 1;
        }
    }
}

/// True iff d(lambda) > n_cycles, in which case chi^lambda_rho = 0 for any
/// rho with that many cycles.
pub fn chi_vanishing_check(lambda: &Partition, n_cycles: usize) -> bool {
    lambda.diagonal() > n_cycles
}
