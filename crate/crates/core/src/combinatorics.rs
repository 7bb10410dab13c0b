//! Exact integer combinatorics plus the one floating-point approximation the
//! growth analysis needs.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::rational::log10_biguint;
use crate::{Error, Result};

pub fn factorial(n: u32) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `(2v-1)!! = 1·3·5···(2v-1)`, with the empty product for `v = 0`.
pub fn double_factorial_odd(v: u32) -> BigUint {
    (1..=v).fold(BigUint::one(), |acc, i| acc * (2 * i - 1))
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    // Each prefix product is itself a binomial, so the division is exact.
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `n! ≈ sqrt((2n + 1/3)π) (n/e)^n`.
///
/// Overflows to `inf` past `n ≈ 170` like the factorial itself; use
/// [`stirling_ln`] for larger arguments.
pub fn stirling_approx(n: u32) -> Result<f64> {
    check_stirling_arg(n)?;
    let n = n as f64;
    Ok(libm::sqrt((2.0 * n + 1.0 / 3.0) * core::f64::consts::PI) * libm::pow(n / core::f64::consts::E, n))
}

/// Natural log of [`stirling_approx`], finite for every `n >= 1`.
pub fn stirling_ln(n: u32) -> Result<f64> {
    check_stirling_arg(n)?;
    let n = n as f64;
    Ok(0.5 * libm::log((2.0 * n + 1.0 / 3.0) * core::f64::consts::PI) + n * (libm::log(n) - 1.0))
}

/// `|approx / n! - 1|`, computed in log space against the exact factorial.
pub fn stirling_relative_error(n: u32) -> Result<f64> {
    let exact_ln = log10_biguint(&factorial(n))? * core::f64::consts::LN_10;
    Ok(libm::fabs(libm::expm1(stirling_ln(n)? - exact_ln)))
}

fn check_stirling_arg(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("Stirling approximation needs n >= 1".into()));
    }
    Ok(())
}

/// Number of ordered `blocks`-tuples of pairwise disjoint subsets, each of
/// size at least `min_block`, covering a labelled set of `elements` items.
///
/// Top-down dynamic programme over (remaining elements, remaining blocks):
/// the first block takes any `k >= min_block` of the remaining items.
pub fn block_partition_count(elements: u32, blocks: u32, min_block: u32) -> BigUint {
    let mut memo: Vec<Vec<Option<BigUint>>> =
        vec![vec![None; blocks as usize + 1]; elements as usize + 1];
    covers(elements, blocks, min_block, &mut memo)
}

fn covers(remaining: u32, blocks: u32, min_block: u32, memo: &mut Vec<Vec<Option<BigUint>>>) -> BigUint {
    if blocks == 0 {
        return if remaining == 0 { BigUint::one() } else { BigUint::zero() };
    }
    if let Some(hit) = &memo[remaining as usize][blocks as usize] {
        return hit.clone();
    }
    let mut total = BigUint::zero();
    // Leave at least `min_block` items for each of the other blocks.
    let reserve = min_block.saturating_mul(blocks - 1);
    if remaining >= reserve {
        for k in min_block..=remaining - reserve {
            let rest = covers(remaining - k, blocks - 1, min_block, memo);
            if !rest.is_zero() {
                total += binomial(remaining as u64, k as u64) * rest;
            }
        }
    }
    memo[remaining as usize][blocks as usize] = Some(total.clone());
    total
}
