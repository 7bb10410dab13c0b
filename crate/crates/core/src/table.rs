//! The stopping-set coefficient table `A(v,t,s)`.
//!
//! `v` counts degree-2 variable nodes, `t` the check nodes hit at least twice
//! and `s` the check nodes hit exactly once. Level `v` of the table depends
//! only on level `v-1`:
//!
//! ```text
//! s·A(v,t,s) = A(v-1,t,s-2)·(m-t-s+2)(m-t-s+1)   [s >= 2]
//!            + A(v-1,t,s-1)·(m-t-s+1)·t
//!            + A(v-1,t-1,s)·(m-t-s+1)·s
//! ```
//!
//! for `1 <= t <= m`, `1 <= s <= m-t`. The `s = 0` row comes from the closed
//! form `A(v,t,0) = C(m,t)·(2v-1)!!·[x^{2v}](e^x-1-x)^t`; the `v = 0` and
//! `t = 0` layers come from a [`BaseConfig`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combinatorics::{binomial, double_factorial_odd, factorial};
use crate::rational::{self, from_biguint, Rational};
use crate::series::{poisson_block_powers, poisson_block_series};
use crate::{Error, Result};

/// Enumeration guard for [`brute_force_profile_counts`].
pub const PROFILE_ENUMERATION_LIMIT: u128 = 100_000_000;

/// Code length `n`, rate `r` and the derived check count `m = (1-r)n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnsembleParams {
    n: u64,
    rate: Rational,
    m: u32,
}

impl EnsembleParams {
    pub fn new(n: u64, rate: Rational) -> Result<Self> {
        if rate.is_negative() || rate >= Rational::one() {
            return Err(Error::InvalidArgument(format!(
                "rate {} outside [0, 1)",
                rational::to_pq(&rate)
            )));
        }
        let checks = (Rational::one() - &rate) * BigInt::from(n);
        if !checks.is_integer() {
            return Err(Error::InvalidArgument(format!(
                "(1 - r)·n = {} is not an integer",
                rational::to_pq(&checks)
            )));
        }
        let m = checks
            .to_integer()
            .to_u32()
            .ok_or_else(|| Error::InvalidArgument("check count does not fit in u32".into()))?;
        if m == 0 {
            return Err(Error::InvalidArgument("need at least one check node".into()));
        }
        Ok(EnsembleParams { n, rate, m })
    }

    /// Rate-zero ensemble with `n = m`; the table only depends on `m`.
    pub fn with_checks(m: u32) -> Result<Self> {
        Self::new(u64::from(m), Rational::zero())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn rate(&self) -> &Rational {
        &self.rate
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `k = m + 1`, the shorthand used by the PDE coefficients.
    pub fn k(&self) -> u32 {
        self.m + 1
    }
}

/// Convention for the layers the recurrence never determines: `v = 0`
/// and `t = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseConfig {
    /// `A(0,0,0) = 1`, every other `v = 0` entry and every `t = 0` entry zero.
    Default,
    /// `A(0,0,0) = 1`, and the `t = 0` layer for `v >= 1` follows the
    /// recurrence with `t = 0` (constellations whose endpoints all land on
    /// distinct checks). Matches the brute-force profile counts exactly.
    ZeroDegreeRecurrence,
    /// Explicit `(v,t,s) -> value` entries on the `v = 0` and `t = 0` layers.
    Custom(BTreeMap<(u32, u32, u32), Rational>),
}

impl BaseConfig {
    pub fn name(&self) -> &'static str {
        match self {
            BaseConfig::Default => "default",
            BaseConfig::ZeroDegreeRecurrence => "t0-recurrence",
            BaseConfig::Custom(_) => "custom",
        }
    }

    /// Parses the non-custom names.
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "default" => Some(BaseConfig::Default),
            "t0-recurrence" => Some(BaseConfig::ZeroDegreeRecurrence),
            _ => None,
        }
    }

    /// Rejects custom entries outside `v = 0 ∪ t = 0` or outside the support.
    pub fn validate(&self, m: u32) -> Result<()> {
        let BaseConfig::Custom(entries) = self else {
            return Ok(());
        };
        for (&(v, t, s), value) in entries {
            if value.is_zero() {
                continue;
            }
            if v != 0 && t != 0 {
                return Err(Error::Validation(format!(
                    "base entry ({v},{t},{s}) is neither on the v = 0 nor the t = 0 layer"
                )));
            }
            if t > m || s > m - t {
                return Err(Error::Validation(format!(
                    "base entry ({v},{t},{s}) outside the support t <= {m}, s <= m - t"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Ten,
    E,
}

/// One `v`-level: dense triangle `0 <= t <= m`, `0 <= s <= m - t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Level {
    m: u32,
    entries: Vec<Rational>,
}

impl Level {
    pub fn zero(m: u32) -> Self {
        let len = row_offset(m, m + 1);
        Level { m, entries: vec![Rational::zero(); len] }
    }

    /// Assembles a level from its rows `t = 0..=m`, row `t` holding `m-t+1` values.
    pub fn from_rows(m: u32, rows: Vec<Vec<Rational>>) -> Result<Self> {
        if rows.len() != m as usize + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} rows, got {}",
                m + 1,
                rows.len()
            )));
        }
        let mut entries = Vec::with_capacity(row_offset(m, m + 1));
        for (t, row) in rows.into_iter().enumerate() {
            if row.len() != (m as usize - t) + 1 {
                return Err(Error::InvalidArgument(format!("row t = {t} has wrong length")));
            }
            entries.extend(row);
        }
        Ok(Level { m, entries })
    }

    pub fn get(&self, t: u32, s: u32) -> Option<&Rational> {
        if t > self.m || s > self.m - t {
            return None;
        }
        self.entries.get(row_offset(self.m, t) + s as usize)
    }

    pub fn set(&mut self, t: u32, s: u32, value: Rational) -> Result<()> {
        if t > self.m || s > self.m - t {
            return Err(Error::Validation(format!("({t},{s}) outside the support for m = {}", self.m)));
        }
        let at = row_offset(self.m, t) + s as usize;
        self.entries[at] = value;
        Ok(())
    }

    /// Entries `(t, s, value)` in `(t, s)` order, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, &Rational)> + '_ {
        let m = self.m;
        (0..=m).flat_map(move |t| (0..=m - t).map(move |s| (t, s))).zip(&self.entries).map(|((t, s), a)| (t, s, a))
    }
}

/// Number of stored entries in rows `0..t`: `Σ_{t'<t} (m - t' + 1)`.
fn row_offset(m: u32, t: u32) -> usize {
    let (m, t) = (m as usize, t as usize);
    t * (m + 1) - t * t.saturating_sub(1) / 2
}

/// Precomputed `s = 0` row: `A(v,t,0)` for `0 <= v <= vmax`, `0 <= t <= m`.
#[derive(Debug, Clone)]
pub struct Boundary {
    vmax: u32,
    /// `values[t][v]`
    values: Vec<Vec<Rational>>,
}

impl Boundary {
    pub fn new(params: &EnsembleParams, vmax: u32) -> Self {
        let m = params.m();
        let order = 2 * vmax as usize;
        // (e^x-1-x)^t starts at x^{2t}; powers past vmax contribute nothing.
        let live = m.min(vmax);
        let powers = poisson_block_powers(live, order);
        let values = (0..=m)
            .map(|t| {
                (0..=vmax)
                    .map(|v| match powers.get(t as usize) {
                        Some(series) if t >= 1 && v >= 1 => boundary_from_coef(m, v, t, &series[2 * v as usize]),
                        _ => Rational::zero(),
                    })
                    .collect()
            })
            .collect();
        Boundary { vmax, values }
    }

    pub fn get(&self, v: u32, t: u32) -> Rational {
        if v > self.vmax {
            return Rational::zero();
        }
        self.values
            .get(t as usize)
            .map(|row| row[v as usize].clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn vmax(&self) -> u32 {
        self.vmax
    }
}

fn boundary_from_coef(m: u32, v: u32, t: u32, coef: &Rational) -> Rational {
    let weight = binomial(u64::from(m), u64::from(t)) * double_factorial_odd(v);
    coef * from_biguint(weight)
}

/// `N(v) = m^{2v}` for `0 <= v <= n`, zero beyond the code length.
pub fn constellation_count(params: &EnsembleParams, v: u32) -> BigUint {
    if u64::from(v) > params.n() {
        return BigUint::zero();
    }
    num_traits::pow(BigUint::from(params.m()), 2 * v as usize)
}

/// `S(v,t) = C(m,t)·(2v)!·[x^{2v}](e^x-1-x)^t`: constellations of `v`
/// variables that form a stopping set on exactly `t` checks.
pub fn stopping_set_count(params: &EnsembleParams, v: u32, t: u32) -> BigUint {
    let order = 2 * v as usize;
    let coef = poisson_block_series(t, order)[order].clone();
    let count = coef
        * from_biguint(factorial(2 * v))
        * from_biguint(binomial(u64::from(params.m()), u64::from(t)));
    debug_assert!(count.is_integer());
    count.to_integer().to_biguint().unwrap_or_default()
}

/// `A(v,t,0) = C(m,t)·(2v-1)!!·[x^{2v}](e^x-1-x)^t`, so that
/// `v!·2^v·A(v,t,0) = S(v,t)`.
pub fn boundary_coefficient(params: &EnsembleParams, v: u32, t: u32) -> Result<Rational> {
    if v == 0 || t == 0 {
        return Err(Error::InvalidArgument("boundary layer needs v >= 1 and t >= 1".into()));
    }
    let order = 2 * v as usize;
    let series = poisson_block_series(t, order);
    Ok(boundary_from_coef(params.m(), v, t, &series[order]))
}

/// `v!·2^v`, the labelling factor between `A` and constellation counts.
pub fn labelling_factor(v: u32) -> BigUint {
    factorial(v) << v as usize
}

/// Right-hand side of the recurrence for `(t, s)` with `s >= 1`, reading the
/// previous level through `prev`.
pub fn recurrence_rhs<'a, F>(m: u32, t: u32, s: u32, prev: F) -> Rational
where
    F: Fn(u32, u32) -> Option<&'a Rational>,
{
    debug_assert!(s >= 1 && t + s <= m);
    let free = i64::from(m) - i64::from(t) - i64::from(s) + 1;
    let mut rhs = Rational::zero();
    if s >= 2 {
        if let Some(a) = prev(t, s - 2).filter(|a| !a.is_zero()) {
            rhs += a * BigInt::from((free + 1) * free);
        }
    }
    if let Some(a) = prev(t, s - 1).filter(|a| !a.is_zero()) {
        rhs += a * BigInt::from(free * i64::from(t));
    }
    if t >= 1 {
        if let Some(a) = prev(t - 1, s).filter(|a| !a.is_zero()) {
            rhs += a * BigInt::from(free * i64::from(s));
        }
    }
    rhs
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceViolation {
    pub v: u32,
    pub t: u32,
    pub s: u32,
    pub lhs: Rational,
    pub rhs: Rational,
}

/// Brute-force count against `v!·2^v·A(v,t,s)` for one profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileComparison {
    pub t: u32,
    pub s: u32,
    pub brute_force: u64,
    pub from_table: Rational,
}

impl ProfileComparison {
    pub fn agrees(&self) -> bool {
        self.from_table == Rational::from_integer(BigInt::from(self.brute_force))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTable {
    params: EnsembleParams,
    base: BaseConfig,
    levels: Vec<Level>,
}

impl CoeffTable {
    /// Fills levels `0..=vmax` sequentially.
    pub fn fill(params: EnsembleParams, vmax: u32, base: BaseConfig) -> Result<Self> {
        let mut table = Self::with_base_level(params, base)?;
        table.extend_to(vmax)?;
        Ok(table)
    }

    /// A table holding only level 0.
    pub fn with_base_level(params: EnsembleParams, base: BaseConfig) -> Result<Self> {
        let m = params.m();
        if u64::from(m) > params.n() {
            return Err(Error::InvalidArgument("m exceeds n".into()));
        }
        base.validate(m)?;
        let mut level = Level::zero(m);
        match &base {
            BaseConfig::Custom(entries) => {
                for (&(v, t, s), value) in entries {
                    if v == 0 {
                        level.set(t, s, value.clone())?;
                    }
                }
            }
            _ => level.set(0, 0, Rational::one())?,
        }
        Ok(CoeffTable { params, base, levels: vec![level] })
    }

    /// Continues the fill up to `vmax`, reusing every level already present.
    pub fn extend_to(&mut self, vmax: u32) -> Result<()> {
        if vmax <= self.vmax() {
            return Ok(());
        }
        self.check_depth(vmax)?;
        let boundary = Boundary::new(&self.params, vmax);
        for v in self.vmax() + 1..=vmax {
            let rows = (0..=self.params.m()).map(|t| self.level_row(v, t, &boundary)).collect();
            let level = Level::from_rows(self.params.m(), rows)?;
            self.push_level(level)?;
        }
        Ok(())
    }

    pub fn check_depth(&self, vmax: u32) -> Result<()> {
        if u64::from(vmax) > self.params.n() {
            return Err(Error::InvalidArgument(format!(
                "vmax = {vmax} exceeds the code length n = {}",
                self.params.n()
            )));
        }
        Ok(())
    }

    /// Row `t` of level `v`, computed from level `v - 1` only. Rows of one
    /// level are independent, which is what the parallel driver relies on.
    pub fn level_row(&self, v: u32, t: u32, boundary: &Boundary) -> Vec<Rational> {
        let m = self.params.m();
        let prev = &self.levels[v as usize - 1];
        let lookup = |t: u32, s: u32| prev.get(t, s);
        (0..=m - t)
            .map(|s| match (t, s) {
                (0, _) => self.zero_degree_entry(v, s, &lookup),
                (_, 0) => boundary.get(v, t),
                _ => recurrence_rhs(m, t, s, &lookup) / BigInt::from(s),
            })
            .collect()
    }

    fn zero_degree_entry<'a, F>(&self, v: u32, s: u32, lookup: &F) -> Rational
    where
        F: Fn(u32, u32) -> Option<&'a Rational>,
    {
        match &self.base {
            BaseConfig::Default => Rational::zero(),
            BaseConfig::ZeroDegreeRecurrence if s == 0 => Rational::zero(),
            BaseConfig::ZeroDegreeRecurrence => {
                recurrence_rhs(self.params.m(), 0, s, lookup) / BigInt::from(s)
            }
            BaseConfig::Custom(entries) => entries.get(&(v, 0, s)).cloned().unwrap_or_else(Rational::zero),
        }
    }

    /// Appends the next level; used by drivers that compute rows themselves.
    pub fn push_level(&mut self, level: Level) -> Result<()> {
        if level.m != self.params.m() {
            return Err(Error::InvalidArgument("level built for a different m".into()));
        }
        self.check_depth(self.vmax() + 1)?;
        self.levels.push(level);
        Ok(())
    }

    /// Rebuilds a table from stored levels (e.g. read back from disk).
    pub fn from_levels(params: EnsembleParams, base: BaseConfig, levels: Vec<Level>) -> Result<Self> {
        base.validate(params.m())?;
        if levels.is_empty() {
            return Err(Error::InvalidArgument("a table needs at least level 0".into()));
        }
        if levels.iter().any(|level| level.m != params.m()) {
            return Err(Error::InvalidArgument("level built for a different m".into()));
        }
        let table = CoeffTable { params, base, levels };
        table.check_depth(table.vmax())?;
        Ok(table)
    }

    pub fn params(&self) -> &EnsembleParams {
        &self.params
    }

    pub fn base(&self) -> &BaseConfig {
        &self.base
    }

    pub fn m(&self) -> u32 {
        self.params.m()
    }

    pub fn vmax(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, v: u32) -> Option<&Level> {
        self.levels.get(v as usize)
    }

    /// Stored entry, `None` outside `0..=vmax` or outside the support.
    pub fn get(&self, v: u32, t: u32, s: u32) -> Option<&Rational> {
        self.level(v)?.get(t, s)
    }

    /// Entry value with zero everywhere outside the stored range.
    pub fn entry(&self, v: u32, t: u32, s: u32) -> Rational {
        self.get(v, t, s).cloned().unwrap_or_else(Rational::zero)
    }

    /// Non-zero entries in lexicographic `(v, t, s)` order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (u32, u32, u32, &Rational)> + '_ {
        self.levels.iter().enumerate().flat_map(|(v, level)| {
            level
                .iter()
                .filter(|(_, _, a)| !a.is_zero())
                .map(move |(t, s, a)| (v as u32, t, s, a))
        })
    }

    /// Sum of `A(v,t,s)` over `1 <= t <= m`, `0 <= s <= m - t`.
    pub fn level_sum(&self, v: u32) -> Result<Rational> {
        let level = self.level(v).ok_or(Error::Coverage { missing_v: v })?;
        Ok(level
            .iter()
            .filter(|(t, _, _)| *t >= 1)
            .fold(Rational::zero(), |acc, (_, _, a)| acc + a))
    }

    /// Re-checks `s·A(v,t,s)` against the recurrence for every
    /// `v, t, s >= 1`, reading entries by index only.
    pub fn verify_recurrence(&self) -> Vec<RecurrenceViolation> {
        let m = self.m();
        let mut violations = Vec::new();
        for v in 1..=self.vmax() {
            for t in 1..=m {
                for s in 1..=m - t {
                    if let Some(violation) = self.check_recurrence_at(v, t, s) {
                        violations.push(violation);
                    }
                }
            }
        }
        violations
    }

    /// `None` when the identity holds at `(v, t, s)` (`v, t, s >= 1`).
    pub fn check_recurrence_at(&self, v: u32, t: u32, s: u32) -> Option<RecurrenceViolation> {
        let lhs = self.entry(v, t, s) * BigInt::from(s);
        let rhs = recurrence_rhs(self.m(), t, s, |t, s| self.get(v - 1, t, s));
        (lhs != rhs).then(|| RecurrenceViolation { v, t, s, lhs, rhs })
    }

    /// `(v, t)` pairs where `v!·2^v·A(v,t,0) != S(v,t)`.
    pub fn verify_boundary(&self) -> Vec<(u32, u32)> {
        let mut bad = Vec::new();
        for v in 1..=self.vmax() {
            let factor = from_biguint(labelling_factor(v));
            for t in 1..=self.m() {
                let lhs = self.entry(v, t, 0) * &factor;
                if lhs != from_biguint(stopping_set_count(&self.params, v, t)) {
                    bad.push((v, t));
                }
            }
        }
        bad
    }

    /// Indices of negative entries; non-empty means the base convention
    /// produced something that cannot be a count.
    pub fn negative_entries(&self) -> Vec<(u32, u32, u32)> {
        self.nonzero_entries()
            .filter(|(_, _, _, a)| a.is_negative())
            .map(|(v, t, s, _)| (v, t, s))
            .collect()
    }

    /// `g^{(t)}(v) = log(A(v,t,0) / C(m,t))` from exact integer logarithms.
    pub fn growth_exponent(&self, v: u32, t: u32, base: LogBase) -> Result<f64> {
        if v > self.vmax() {
            return Err(Error::Coverage { missing_v: v });
        }
        let a = self.entry(v, t, 0);
        if !a.is_positive() {
            return Err(Error::UndefinedValue(format!("A({v},{t},0) is not positive")));
        }
        let ratio = a / from_biguint(binomial(u64::from(self.m()), u64::from(t)));
        let log10 = rational::log10_abs(&ratio)?;
        Ok(match base {
            LogBase::Ten => log10,
            LogBase::E => log10 * core::f64::consts::LN_10,
        })
    }

    /// Compares `v!·2^v·A(v,t,s)` with the exhaustive profile counts over
    /// every profile either side reports.
    pub fn compare_with_brute_force(&self, v: u32) -> Result<Vec<ProfileComparison>> {
        let level = self.level(v).ok_or(Error::Coverage { missing_v: v })?;
        let counts = brute_force_profile_counts(self.m(), v)?;
        let factor = from_biguint(labelling_factor(v));
        let mut rows = Vec::new();
        for (t, s, a) in level.iter() {
            let brute_force = counts.get(&(t, s)).copied().unwrap_or(0);
            if brute_force != 0 || !a.is_zero() {
                rows.push(ProfileComparison { t, s, brute_force, from_table: a * &factor });
            }
        }
        Ok(rows)
    }
}

/// Exhaustive classification of all `m^{2v}` maps from `2v` labelled
/// endpoints to `m` labelled checks by `(t, s)`: `t` checks receive at least
/// two endpoints, `s` checks exactly one.
pub fn brute_force_profile_counts(m: u32, v: u32) -> Result<BTreeMap<(u32, u32), u64>> {
    let endpoints = 2 * v as usize;
    let total = (m as u128).checked_pow(endpoints as u32).unwrap_or(u128::MAX);
    if total > PROFILE_ENUMERATION_LIMIT {
        return Err(Error::ResourceLimit { required: total, limit: PROFILE_ENUMERATION_LIMIT });
    }
    let mut counts = BTreeMap::new();
    if m == 0 {
        return Ok(counts);
    }
    let mut map = vec![0u32; endpoints];
    let mut degree = vec![0u32; m as usize];
    degree[0] = endpoints as u32;
    loop {
        let (mut t, mut s) = (0, 0);
        for &d in &degree {
            match d {
                0 => {}
                1 => s += 1,
                _ => t += 1,
            }
        }
        *counts.entry((t, s)).or_insert(0) += 1;
        // Odometer step, keeping the degree histogram in sync.
        let mut i = 0;
        loop {
            if i == endpoints {
                return Ok(counts);
            }
            degree[map[i] as usize] -= 1;
            map[i] += 1;
            if map[i] == m {
                map[i] = 0;
                degree[0] += 1;
                i += 1;
            } else {
                degree[map[i] as usize] += 1;
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn params(m: u32) -> EnsembleParams {
        EnsembleParams::with_checks(m).unwrap()
    }

    #[test]
    fn params_validation() {
        let p = EnsembleParams::new(4, frac(1, 2)).unwrap();
        assert_eq!((p.m(), p.k()), (2, 3));
        assert!(EnsembleParams::new(5, frac(1, 2)).is_err());
        assert!(EnsembleParams::new(5, int(1)).is_err());
        assert!(EnsembleParams::new(5, frac(-1, 5)).is_err());
    }

    #[test]
    fn row_offsets_partition_the_triangle() {
        for m in 1..8 {
            let mut expected = 0;
            for t in 0..=m {
                assert_eq!(row_offset(m, t), expected);
                expected += (m - t) as usize + 1;
            }
            assert_eq!(row_offset(m, m + 1), expected);
        }
    }

    #[test]
    fn constellation_counts() {
        let p = params(3);
        assert_eq!(constellation_count(&p, 1), BigUint::from(9u32));
        assert_eq!(constellation_count(&p, 0), BigUint::one());
        let short = EnsembleParams::new(4, frac(1, 4)).unwrap();
        assert_eq!(constellation_count(&short, 5), BigUint::zero());
    }

    #[test]
    fn stopping_set_spot_values() {
        let p = params(3);
        assert_eq!(stopping_set_count(&p, 1, 1), BigUint::from(3u32));
        assert_eq!(stopping_set_count(&p, 2, 2), BigUint::from(18u32));
        assert_eq!(stopping_set_count(&params(7), 1, 2), BigUint::zero());
    }

    #[test]
    fn boundary_spot_values() {
        assert_eq!(boundary_coefficient(&params(9), 1, 1).unwrap(), frac(9, 2));
        assert_eq!(boundary_coefficient(&params(100), 2, 2).unwrap(), frac(7425, 2));
        assert!(boundary_coefficient(&params(5), 1, 3).unwrap().is_zero());
        assert!(boundary_coefficient(&params(5), 0, 1).is_err());
    }

    #[test]
    fn fill_examples() {
        let table = CoeffTable::fill(params(3), 3, BaseConfig::Default).unwrap();
        assert_eq!(table.entry(1, 1, 0), frac(3, 2));
        assert!(table.entry(1, 1, 1).is_zero());
        assert!(table.verify_recurrence().is_empty());
        assert!(table.verify_boundary().is_empty());
        assert!(table.negative_entries().is_empty());
    }

    #[test]
    fn brute_force_small_cases() {
        let counts = brute_force_profile_counts(3, 1).unwrap();
        assert_eq!(counts.len(), 2);
        assert_eq!(counts[&(1, 0)], 3);
        assert_eq!(counts[&(0, 2)], 6);
        assert!(!counts.contains_key(&(1, 1)));
        let counts = brute_force_profile_counts(4, 3).unwrap();
        assert_eq!(counts.values().sum::<u64>(), 4u64.pow(6));
        assert!(matches!(
            brute_force_profile_counts(100, 5),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn zero_degree_recurrence_base_matches_brute_force() {
        for m in 1..=4 {
            let table = CoeffTable::fill(params(m), 3.min(m), BaseConfig::ZeroDegreeRecurrence).unwrap();
            for v in 1..=table.vmax() {
                for row in table.compare_with_brute_force(v).unwrap() {
                    assert!(row.agrees(), "m={m} v={v} {row:?}");
                }
            }
        }
    }

    #[test]
    fn default_base_misses_the_distinct_endpoint_profiles() {
        let table = CoeffTable::fill(params(3), 2, BaseConfig::Default).unwrap();
        let rows = table.compare_with_brute_force(1).unwrap();
        let bad: Vec<_> = rows.iter().filter(|r| !r.agrees()).map(|r| (r.t, r.s)).collect();
        assert_eq!(bad, vec![(0, 2)]);
    }

    #[test]
    fn custom_base_validation() {
        let mut entries = BTreeMap::new();
        entries.insert((0, 0, 0), int(1));
        assert!(CoeffTable::fill(params(3), 2, BaseConfig::Custom(entries.clone())).is_ok());
        entries.insert((1, 1, 1), int(2));
        assert!(matches!(
            CoeffTable::fill(params(3), 2, BaseConfig::Custom(entries)),
            Err(Error::Validation(_))
        ));
        let mut outside = BTreeMap::new();
        outside.insert((0, 2, 2), int(1));
        assert!(BaseConfig::Custom(outside).validate(3).is_err());
    }

    #[test]
    fn custom_base_equal_to_default_reproduces_it() {
        let mut entries = BTreeMap::new();
        entries.insert((0, 0, 0), int(1));
        let custom = CoeffTable::fill(params(4), 3, BaseConfig::Custom(entries)).unwrap();
        let default = CoeffTable::fill(params(4), 3, BaseConfig::Default).unwrap();
        assert_eq!(custom.levels(), default.levels());
    }

    #[test]
    fn extend_matches_single_fill() {
        let mut table = CoeffTable::fill(params(5), 2, BaseConfig::Default).unwrap();
        table.extend_to(5).unwrap();
        assert_eq!(table, CoeffTable::fill(params(5), 5, BaseConfig::Default).unwrap());
        assert!(table.clone().extend_to(6).is_err());
    }

    #[test]
    fn growth_exponents() {
        let table = CoeffTable::fill(params(100), 2, BaseConfig::Default).unwrap();
        let g = table.growth_exponent(1, 1, LogBase::Ten).unwrap();
        assert!((g - libm::log10(0.5)).abs() < 1e-13);
        let ge = table.growth_exponent(1, 1, LogBase::E).unwrap();
        assert!((ge - libm::log(0.5)).abs() < 1e-13);
        assert!(matches!(table.growth_exponent(1, 2, LogBase::Ten), Err(Error::UndefinedValue(_))));
        assert!(matches!(table.growth_exponent(3, 1, LogBase::Ten), Err(Error::Coverage { .. })));
    }
}
