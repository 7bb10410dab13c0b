//! Monte Carlo estimate of the block-error probability under peeling, plus
//! an exhaustive exact oracle for tiny ensembles.
//!
//! Reproducibility contract: trial `i` of a run with master seed `S` uses
//! `ChaCha8Rng::seed_from_u64(S)` switched to stream `i`. It first draws
//! `2n` words for the endpoints (endpoint `2j`, `2j+1` belong to variable
//! `j`; a word `w` maps to check `(w·m) >> 64`), then `n` words for the
//! erasures (variable `j` is erased iff `w < ceil(ε·2⁶⁴)`). Trials never
//! share a stream, so any partition of the trial range over threads yields
//! the same failure count.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{self, Rational};
use crate::table::EnsembleParams;
use crate::{Error, Result};

/// Identifier stored in every [`SimResult`].
pub const RNG_ID: &str = "chacha8";

/// Largest number of codes the exhaustive oracle will enumerate.
pub const EXHAUSTIVE_CODE_LIMIT: u128 = 10_000_000;
/// Largest number of erasure patterns the exhaustive oracle will enumerate.
pub const EXHAUSTIVE_PATTERN_LIMIT: u128 = 1 << 15;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledCode {
    params: EnsembleParams,
    endpoints: Vec<u32>,
}

impl SampledCode {
    /// Builds a code from an explicit endpoint list of length `2n`.
    pub fn new(params: EnsembleParams, endpoints: Vec<u32>) -> Result<Self> {
        if endpoints.len() as u64 != 2 * params.n() {
            return Err(Error::InvalidArgument("endpoint list must have length 2n".into()));
        }
        if endpoints.iter().any(|&c| c >= params.m()) {
            return Err(Error::InvalidArgument("check index out of range".into()));
        }
        Ok(SampledCode { params, endpoints })
    }

    pub fn params(&self) -> &EnsembleParams {
        &self.params
    }

    /// Check of endpoint `2j + e` for variable `j`, `e ∈ {0, 1}`.
    pub fn endpoints(&self) -> &[u32] {
        &self.endpoints
    }

    pub fn variables(&self) -> usize {
        self.endpoints.len() / 2
    }
}

/// Draws `2n` endpoints, one rng word each.
pub fn sample_code<R: RngCore>(params: &EnsembleParams, rng: &mut R) -> SampledCode {
    let m = u128::from(params.m());
    let endpoints = (0..2 * params.n())
        .map(|_| ((u128::from(rng.next_u64()) * m) >> 64) as u32)
        .collect();
    SampledCode { params: params.clone(), endpoints }
}

/// Remaining erased variables after peeling, in increasing order.
///
/// A check with exactly one erased endpoint (counted with multiplicity)
/// recovers the variable on that endpoint; this repeats to a fixpoint.
pub fn peel(code: &SampledCode, erased: &[bool]) -> Vec<usize> {
    let n = code.variables();
    assert_eq!(erased.len(), n, "erasure mask must cover every variable");
    let m = code.params.m() as usize;
    let mut pending = vec![0u32; m];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut alive = erased.to_vec();
    for (j, _) in erased.iter().enumerate().filter(|(_, &e)| e) {
        for &c in &code.endpoints[2 * j..2 * j + 2] {
            pending[c as usize] += 1;
            incident[c as usize].push(j);
        }
    }
    let mut queue: Vec<usize> = (0..m).filter(|&c| pending[c] == 1).collect();
    while let Some(c) = queue.pop() {
        if pending[c] != 1 {
            continue;
        }
        let Some(&j) = incident[c].iter().find(|&&j| alive[j]) else {
            continue;
        };
        alive[j] = false;
        for &d in &code.endpoints[2 * j..2 * j + 2] {
            let d = d as usize;
            pending[d] -= 1;
            if pending[d] == 1 {
                queue.push(d);
            }
        }
    }
    let residual: Vec<usize> = (0..n).filter(|&j| alive[j]).collect();
    debug_assert!(is_stopping_set(code, &residual));
    residual
}

/// Every check touching `set` carries at least two of its endpoints.
pub fn is_stopping_set(code: &SampledCode, set: &[usize]) -> bool {
    let mut degree = vec![0u32; code.params.m() as usize];
    for &j in set {
        for &c in &code.endpoints[2 * j..2 * j + 2] {
            degree[c as usize] += 1;
        }
    }
    degree.iter().all(|&d| d != 1)
}

/// `ceil(ε · 2⁶⁴)`: a word below it means "erased".
fn erasure_threshold(epsilon: &Rational) -> u128 {
    let scaled = (epsilon * Rational::from_integer(BigInt::one() << 64u32)).ceil().to_integer();
    scaled.to_u128().unwrap_or(0).min(1u128 << 64)
}

fn check_epsilon(epsilon: &Rational) -> Result<()> {
    if epsilon.is_negative() || *epsilon > Rational::one() {
        return Err(Error::InvalidArgument("erasure probability outside [0, 1]".into()));
    }
    Ok(())
}

/// Stream for trial `trial` of a run seeded with `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

fn trial_fails(params: &EnsembleParams, threshold: u128, rng: &mut ChaCha8Rng) -> bool {
    let code = sample_code(params, rng);
    let erased: Vec<bool> = (0..params.n()).map(|_| u128::from(rng.next_u64()) < threshold).collect();
    !peel(&code, &erased).is_empty()
}

/// Whether trial `trial` ends with a nonempty residual.
pub fn run_trial(params: &EnsembleParams, epsilon: &Rational, master_seed: u64, trial: u64) -> Result<bool> {
    check_epsilon(epsilon)?;
    Ok(trial_fails(params, erasure_threshold(epsilon), &mut trial_rng(master_seed, trial)))
}

/// Failure count over a contiguous range of trial indices.
pub fn count_failures(params: &EnsembleParams, epsilon: &Rational, master_seed: u64, trials: Range<u64>) -> Result<u64> {
    check_epsilon(epsilon)?;
    let threshold = erasure_threshold(epsilon);
    Ok(trials
        .filter(|&i| trial_fails(params, threshold, &mut trial_rng(master_seed, i)))
        .count() as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub params: EnsembleParams,
    pub epsilon: Rational,
    pub trials: u64,
    pub failures: u64,
    pub p_hat: f64,
    pub ci95: (f64, f64),
    pub seed: u64,
    pub rng: &'static str,
}

impl SimResult {
    pub fn from_counts(params: EnsembleParams, epsilon: Rational, trials: u64, failures: u64, seed: u64) -> Self {
        SimResult {
            params,
            epsilon,
            trials,
            failures,
            p_hat: failures as f64 / trials as f64,
            ci95: wilson_interval(failures, trials),
            seed,
            rng: RNG_ID,
        }
    }

    /// Binomial standard error `sqrt(p(1-p)/N)` at probability `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        libm::sqrt(p * (1.0 - p) / self.trials as f64)
    }
}

pub fn estimate_block_error(params: &EnsembleParams, epsilon: &Rational, trials: u64, seed: u64) -> Result<SimResult> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let failures = count_failures(params, epsilon, seed, 0..trials)?;
    Ok(SimResult::from_counts(params.clone(), epsilon.clone(), trials, failures, seed))
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

/// `counts[k]` = number of (code, erasure pattern) pairs with `k` erased
/// variables whose peeling residual is nonempty.
pub fn exhaustive_failure_counts(params: &EnsembleParams) -> Result<Vec<u64>> {
    let n = params.n();
    let m = u128::from(params.m());
    let codes = (0..2 * n).try_fold(1u128, |acc, _| acc.checked_mul(m).filter(|&c| c <= EXHAUSTIVE_CODE_LIMIT));
    let Some(codes) = codes else {
        return Err(Error::ResourceLimit { required: m.saturating_pow((2 * n).min(u32::MAX as u64) as u32), limit: EXHAUSTIVE_CODE_LIMIT });
    };
    if n > 15 {
        return Err(Error::ResourceLimit {
            required: 1u128.checked_shl(n.min(127) as u32).unwrap_or(u128::MAX),
            limit: EXHAUSTIVE_PATTERN_LIMIT,
        });
    }
    let n = n as usize;
    let mut counts = vec![0u64; n + 1];
    let mut endpoints = vec![0u32; 2 * n];
    let mut erased = vec![false; n];
    for code_index in 0..codes {
        let mut rest = code_index;
        for e in endpoints.iter_mut() {
            *e = (rest % m) as u32;
            rest /= m;
        }
        let code = SampledCode { params: params.clone(), endpoints: endpoints.clone() };
        for mask in 0u32..(1 << n) {
            for (j, slot) in erased.iter_mut().enumerate() {
                *slot = mask >> j & 1 == 1;
            }
            if !peel(&code, &erased).is_empty() {
                counts[mask.count_ones() as usize] += 1;
            }
        }
    }
    Ok(counts)
}

/// Exact expected block error over the uniform ensemble and ε-weighted
/// erasure patterns.
pub fn exhaustive_block_error(params: &EnsembleParams, epsilon: &Rational) -> Result<Rational> {
    check_epsilon(epsilon)?;
    let counts = exhaustive_failure_counts(params)?;
    Ok(block_error_from_counts(params, &counts, epsilon))
}

/// Weighs [`exhaustive_failure_counts`] output by `ε^k (1-ε)^{n-k} / m^{2n}`.
pub fn block_error_from_counts(params: &EnsembleParams, counts: &[u64], epsilon: &Rational) -> Rational {
    let n = counts.len() as u32 - 1;
    let keep = Rational::one() - epsilon;
    let total = counts.iter().enumerate().fold(Rational::zero(), |acc, (k, &c)| {
        if c == 0 {
            return acc;
        }
        let k = k as u32;
        acc + Rational::from_integer(BigInt::from(c)) * rational::pow(epsilon, k) * rational::pow(&keep, n - k)
    });
    let codes = rational::pow(&Rational::from_integer(BigInt::from(params.m())), 2 * n);
    total / codes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn params(n: u64, m: u32) -> EnsembleParams {
        EnsembleParams::new(n, frac(i64::try_from(n).unwrap() - i64::from(m), n as i64)).unwrap()
    }

    #[test]
    fn single_check_forces_all_endpoints() {
        let p = params(4, 1);
        let code = sample_code(&p, &mut trial_rng(1, 0));
        assert!(code.endpoints().iter().all(|&c| c == 0));
    }

    #[test]
    fn sampling_is_reproducible() {
        let p = params(20, 7);
        let a = sample_code(&p, &mut trial_rng(42, 3));
        let b = sample_code(&p, &mut trial_rng(42, 3));
        assert_eq!(a, b);
        assert_ne!(a, sample_code(&p, &mut trial_rng(42, 4)));
    }

    #[test]
    fn peeling_hand_cases() {
        let p = params(2, 2);
        let double = SampledCode::new(p.clone(), vec![1, 1, 0, 1]).unwrap();
        assert_eq!(peel(&double, &[true, false]), vec![0]);
        assert!(peel(&double, &[false, false]).is_empty());
        assert!(peel(&double, &[false, true]).is_empty());
        assert_eq!(peel(&double, &[true, true]), vec![0]);
        assert!(SampledCode::new(p, vec![0, 2, 0, 1]).is_err());
        // A 3-cycle on checks 0,1,2 is a stopping set; a path is not.
        let p3 = params(3, 3);
        let cycle = SampledCode::new(p3.clone(), vec![0, 1, 1, 2, 2, 0]).unwrap();
        assert_eq!(peel(&cycle, &[true; 3]), vec![0, 1, 2]);
        let path = SampledCode::new(p3, vec![0, 1, 1, 2, 2, 2]).unwrap();
        assert_eq!(peel(&path, &[true; 3]), vec![2]);
    }

    #[test]
    fn threshold_edges() {
        assert_eq!(erasure_threshold(&int(0)), 0);
        assert_eq!(erasure_threshold(&int(1)), 1 << 64);
        assert_eq!(erasure_threshold(&frac(1, 2)), 1 << 63);
    }

    #[test]
    fn zero_erasure_never_fails() {
        let r = estimate_block_error(&params(10, 5), &int(0), 500, 9).unwrap();
        assert_eq!(r.failures, 0);
        assert_eq!(r.rng, RNG_ID);
    }

    #[test]
    fn exhaustive_small_cases() {
        assert_eq!(exhaustive_block_error(&params(1, 1), &int(1)).unwrap(), int(1));
        assert_eq!(exhaustive_block_error(&params(2, 2), &int(0)).unwrap(), int(0));
        // n = m = 2: one erased variable is trapped iff it is a double edge
        // (half the codes); two erased variables are always trapped.
        assert_eq!(exhaustive_block_error(&params(2, 2), &frac(1, 3)).unwrap(), frac(1, 3));
        assert_eq!(exhaustive_failure_counts(&params(2, 2)).unwrap(), vec![0, 16, 16]);
        assert!(matches!(exhaustive_block_error(&params(12, 6), &int(1)), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn wilson_contains_estimate() {
        for (k, n) in [(0, 10), (10, 10), (3, 17), (500, 1000)] {
            let (lo, hi) = wilson_interval(k, n);
            let p = k as f64 / n as f64;
            assert!(lo <= p && p <= hi && 0.0 <= lo && hi <= 1.0);
        }
    }
}
