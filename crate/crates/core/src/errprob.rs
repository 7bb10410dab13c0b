//! Block-error probability under iterative decoding, evaluated from the
//! coefficient table, and the Hadamard-product machinery used to study the
//! series it is built from.
//!
//! The expectation is the finite sum
//!
//! ```text
//! E_B = (1-ε)^n Σ_{v=1}^{V} C(n,v) v! x^v Σ_{t>=1,s} A(v,t,s),   x = 2ε / ((1-ε) m²)
//! ```
//!
//! which regroups per `(t, s)` as `(1-ε)^n Σ_{t,s} S_{t,s}` with
//! `S_{t,s} = Σ_v C(n,v) v! A(v,t,s) x'^v / n^{2v}` and `x' = 2ε / ((1-ε)(1-r)²)`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::{binomial, factorial};
use crate::rational::{self, from_biguint, Rational};
use crate::series::Series;
use crate::table::{CoeffTable, EnsembleParams};
use crate::{Error, Result};

/// Minimum number of terms in a root-test window.
pub const MIN_ROOT_WINDOW: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrProbQuery {
    params: EnsembleParams,
    epsilon: Rational,
    vmax: u32,
}

impl ErrProbQuery {
    /// Sums `v` up to `min(n, vmax)`; `ε` must lie in `[0, 1)`.
    pub fn new(params: EnsembleParams, epsilon: Rational, vmax: u32) -> Result<Self> {
        if epsilon.is_negative() || epsilon > Rational::one() {
            return Err(Error::InvalidArgument("erasure probability outside [0, 1]".into()));
        }
        if epsilon.is_one() {
            return Err(Error::InvalidArgument("ε = 1 makes x = 2ε/((1-ε)m²) undefined".into()));
        }
        Ok(ErrProbQuery { params, epsilon, vmax })
    }

    pub fn params(&self) -> &EnsembleParams {
        &self.params
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    /// Last `v` in the sum.
    pub fn upper_v(&self) -> u32 {
        self.params.n().min(u64::from(self.vmax)) as u32
    }

    /// `2ε / ((1-ε) m²)`.
    pub fn x(&self) -> Rational {
        let m = Rational::from_integer(BigInt::from(self.params.m()));
        self.two_eps_over_survival() / (&m * &m)
    }

    /// `2ε / ((1-ε)(1-r)²)`, the form with `n^{2v}` factored out.
    pub fn x_scaled(&self) -> Rational {
        let one_minus_r = Rational::one() - self.params.rate();
        self.two_eps_over_survival() / (&one_minus_r * &one_minus_r)
    }

    fn two_eps_over_survival(&self) -> Rational {
        &self.epsilon * BigInt::from(2) / (Rational::one() - &self.epsilon)
    }

    /// `(1-ε)^n`.
    pub fn survival(&self) -> Rational {
        rational::pow(&(Rational::one() - &self.epsilon), self.params.n() as u32)
    }

    fn check_coverage(&self, table: &CoeffTable) -> Result<()> {
        if table.m() != self.params.m() {
            return Err(Error::InvalidArgument("table built for a different m".into()));
        }
        if table.vmax() < self.upper_v() {
            return Err(Error::Coverage { missing_v: table.vmax() + 1 });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockError {
    pub value: Rational,
    /// `(v, term)` for `v = 1..=V`; the terms sum to `value`.
    pub terms: Vec<(u32, Rational)>,
}

/// Exact `E_B` together with its per-`v` terms.
pub fn expected_block_error(query: &ErrProbQuery, table: &CoeffTable) -> Result<BlockError> {
    query.check_coverage(table)?;
    let survival = query.survival();
    let x = query.x();
    let n = query.params.n();
    let mut x_power = Rational::one();
    let mut terms = Vec::with_capacity(query.upper_v() as usize);
    for v in 1..=query.upper_v() {
        x_power *= &x;
        let weight = from_biguint(binomial(n, u64::from(v)) * factorial(v));
        terms.push((v, &survival * weight * &x_power * table.level_sum(v)?));
    }
    let value = terms.iter().fold(Rational::zero(), |acc, (_, t)| acc + t);
    Ok(BlockError { value, terms })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerSum {
    pub value: Rational,
    /// Term for `v = 1, 2, ...`.
    pub terms: Vec<Rational>,
}

/// `S_{t,s} = Σ_{v=1}^{V} C(n,v) v! A(v,t,s) x^v / n^{2v}` for a given `x`.
pub fn inner_power_sum(table: &CoeffTable, t: u32, s: u32, x: &Rational, n: u64, vmax: u32) -> Result<InnerSum> {
    let upper = n.min(u64::from(vmax)) as u32;
    if table.vmax() < upper {
        return Err(Error::Coverage { missing_v: table.vmax() + 1 });
    }
    let n_sq = Rational::from_integer(BigInt::from(n) * BigInt::from(n));
    let step = x / n_sq;
    let mut power = Rational::one();
    let terms: Vec<Rational> = (1..=upper)
        .map(|v| {
            power *= &step;
            let a = table.entry(v, t, s);
            if a.is_zero() {
                return Rational::zero();
            }
            a * from_biguint(binomial(n, u64::from(v)) * factorial(v)) * &power
        })
        .collect();
    let value = terms.iter().fold(Rational::zero(), |acc, t| acc + t);
    Ok(InnerSum { value, terms })
}

/// `E_B` regrouped as `(1-ε)^n Σ_{t>=1,s} S_{t,s}` with the scaled `x`.
pub fn expected_block_error_by_profile(query: &ErrProbQuery, table: &CoeffTable) -> Result<Rational> {
    query.check_coverage(table)?;
    let x = query.x_scaled();
    let m = table.m();
    let mut total = Rational::zero();
    for t in 1..=m {
        for s in 0..=m - t {
            total += inner_power_sum(table, t, s, &x, query.params.n(), query.upper_v())?.value;
        }
    }
    Ok(total * query.survival())
}

/// Ratio-test outcome for `Σ v! x^v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorialSeriesCheck {
    /// `true` when `x = 0` and the series is the constant 1.
    pub trivially_convergent: bool,
    /// First `v` where the term ratio `(v+1)|x|` exceeds 1. The ratio grows
    /// without bound for `x != 0`, so the series diverges from there on.
    pub divergence_detected_at: Option<u32>,
    /// Partial sums `Σ_{v<=j} v! x^v` for `j = 0..=divergence point + 5`.
    pub partial_sums: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownSeriesReport {
    pub n: u64,
    pub x: Rational,
    /// `Σ_v C(n,v) x^v / n^{2v} == (1 + x/n²)^n`.
    pub scaled_binomial_holds: bool,
    /// `Σ_v C(n,v) x^v == (1 + x)^n`.
    pub binomial_holds: bool,
    pub factorial_series: FactorialSeriesCheck,
}

impl KnownSeriesReport {
    /// The identities are finite polynomial identities, valid for all `x`
    /// rather than only `|x| < 1`.
    pub const NOTE: &'static str =
        "finite-n binomial identities hold for every x; the |x| < 1 restriction is unnecessary";
}

pub fn known_series_check(n: u64, x: &Rational) -> KnownSeriesReport {
    let n_sq = Rational::from_integer(BigInt::from(n) * BigInt::from(n));
    let mut lhs_scaled = Rational::zero();
    let mut lhs = Rational::zero();
    for v in 0..=n {
        let c = from_biguint(binomial(n, v));
        let xv = rational::pow(x, v as u32);
        lhs_scaled += &c * &xv / rational::pow(&n_sq, v as u32);
        lhs += c * xv;
    }
    let one = Rational::one();
    let rhs_scaled = if n == 0 { one.clone() } else { rational::pow(&(&one + x / &n_sq), n as u32) };
    let rhs = rational::pow(&(&one + x), n as u32);
    KnownSeriesReport {
        n,
        x: x.clone(),
        scaled_binomial_holds: lhs_scaled == rhs_scaled,
        binomial_holds: lhs == rhs,
        factorial_series: factorial_series_check(x),
    }
}

/// Partial sums of `Σ v! x^v` with a ratio-test divergence flag.
pub fn factorial_series_check(x: &Rational) -> FactorialSeriesCheck {
    if x.is_zero() {
        return FactorialSeriesCheck {
            trivially_convergent: true,
            divergence_detected_at: None,
            partial_sums: alloc::vec![Rational::one()],
        };
    }
    let abs = x.abs();
    let one = Rational::one();
    // (v+1)|x| > 1 first happens at v = floor(1/|x|).
    let detected = (one.clone() / &abs).floor().to_integer();
    let detected: u32 = detected.try_into().unwrap_or(u32::MAX);
    let mut partial_sums = Vec::new();
    let mut term = one.clone();
    let mut sum = Rational::zero();
    for v in 0..=detected.saturating_add(5).min(200) {
        if v > 0 {
            term *= x * BigInt::from(v);
        }
        sum += &term;
        partial_sums.push(sum.clone());
    }
    debug_assert!(Rational::from_integer(BigInt::from(detected) + 1) * &abs > one);
    FactorialSeriesCheck { trivially_convergent: false, divergence_detected_at: Some(detected), partial_sums }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootVerdict {
    /// Every coefficient in the window vanishes: infinite radius.
    Zero,
    /// `|c_v|^{1/v}` increases across the window: radius taken as 0.
    Growing,
    /// Radius estimated as `1 / max |c_v|^{1/v}` over the window.
    Bounded,
}

impl RootVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            RootVerdict::Zero => "zero-sequence",
            RootVerdict::Growing => "growing",
            RootVerdict::Bounded => "bounded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootTest {
    /// First and last `v` of the trailing window.
    pub window: (u32, u32),
    /// `(v, |c_v|^{1/v})` for the non-zero coefficients in the window.
    pub estimates: Vec<(u32, f64)>,
    /// `max |c_v|^{1/v}` over the window (0 for a zero window).
    pub estimate: f64,
    pub verdict: RootVerdict,
}

impl RootTest {
    pub fn radius(&self) -> f64 {
        match self.verdict {
            RootVerdict::Zero => f64::INFINITY,
            RootVerdict::Growing => 0.0,
            RootVerdict::Bounded => 1.0 / self.estimate,
        }
    }

    /// Convergence of `Σ c_v x^v` at `x` according to the estimated radius;
    /// within 5% of the radius the call is left open.
    pub fn verdict_at(&self, x: f64) -> XVerdict {
        let radius = self.radius();
        let x = libm::fabs(x);
        if radius.is_infinite() || x < 0.95 * radius {
            XVerdict::Converges
        } else if x > 1.05 * radius {
            XVerdict::Diverges
        } else {
            XVerdict::Borderline
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XVerdict {
    Converges,
    Diverges,
    Borderline,
}

impl XVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            XVerdict::Converges => "converges",
            XVerdict::Diverges => "diverges",
            XVerdict::Borderline => "borderline",
        }
    }
}

/// Root test on `c_1, c_2, ...` (index 0 holds `c_1`) over the trailing
/// half of the sequence, at least [`MIN_ROOT_WINDOW`] terms.
pub fn root_test(coeffs: &[Rational]) -> Result<RootTest> {
    let available = coeffs.len();
    let width = available.div_ceil(2).max(MIN_ROOT_WINDOW);
    if width > available {
        return Err(Error::Window { needed: width, available });
    }
    let first = available - width;
    let mut estimates = Vec::with_capacity(width);
    for (i, c) in coeffs.iter().enumerate().skip(first) {
        if c.is_zero() {
            continue;
        }
        let v = i as u32 + 1;
        estimates.push((v, libm::pow(10.0, rational::log10_abs(c)? / f64::from(v))));
    }
    let window = (first as u32 + 1, available as u32);
    if estimates.is_empty() {
        return Ok(RootTest { window, estimates, estimate: 0.0, verdict: RootVerdict::Zero });
    }
    let estimate = estimates.iter().map(|e| e.1).fold(f64::MIN, f64::max);
    let growing = estimates.len() >= 2 && estimates.windows(2).all(|w| w[1].1 > w[0].1);
    let verdict = if growing { RootVerdict::Growing } else { RootVerdict::Bounded };
    Ok(RootTest { window, estimates, estimate, verdict })
}

/// The three candidate coefficient sequences for a fixed `(t, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitSeries {
    /// `v! A(v,t,s)`
    Factorial,
    /// `v! A(v,t,s) / n^{2v}`
    FactorialScaled,
    /// `C(n,v) A(v,t,s) / n^{2v}`
    BinomialScaled,
}

impl SplitSeries {
    pub const ALL: [SplitSeries; 3] = [SplitSeries::Factorial, SplitSeries::FactorialScaled, SplitSeries::BinomialScaled];

    pub fn id(self) -> &'static str {
        match self {
            SplitSeries::Factorial => "vfact_A",
            SplitSeries::FactorialScaled => "vfact_A_over_n2v",
            SplitSeries::BinomialScaled => "binom_A_over_n2v",
        }
    }

    pub fn coefficients(self, table: &CoeffTable, t: u32, s: u32, n: u64) -> Vec<Rational> {
        let n_sq = Rational::from_integer(BigInt::from(n) * BigInt::from(n));
        (1..=table.vmax())
            .map(|v| {
                let a = table.entry(v, t, s);
                match self {
                    SplitSeries::Factorial => a * from_biguint(factorial(v)),
                    SplitSeries::FactorialScaled => a * from_biguint(factorial(v)) / rational::pow(&n_sq, v),
                    SplitSeries::BinomialScaled => {
                        a * from_biguint(binomial(n, u64::from(v))) / rational::pow(&n_sq, v)
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitRow {
    pub series: SplitSeries,
    pub root_test: RootTest,
    pub at_x: Vec<(Rational, XVerdict)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitReport {
    pub t: u32,
    pub s: u32,
    pub n: u64,
    pub rows: Vec<SplitRow>,
}

impl SplitReport {
    pub const CAVEAT: &'static str = "radius estimates are for this single (t, s); bounding the block error still needs the sum over all (t, s)";
}

pub fn hadamard_split_report(table: &CoeffTable, t: u32, s: u32, n: u64, x_grid: &[Rational]) -> Result<SplitReport> {
    let rows = SplitSeries::ALL
        .iter()
        .map(|&series| {
            let root_test = root_test(&series.coefficients(table, t, s, n))?;
            let at_x = x_grid
                .iter()
                .map(|x| (x.clone(), root_test.verdict_at(rational::to_f64(x))))
                .collect();
            Ok(SplitRow { series, root_test, at_x })
        })
        .collect::<Result<_>>()?;
    Ok(SplitReport { t, s, n, rows })
}

// ---------------------------------------------------------------------------
// Contour quadrature.
// ---------------------------------------------------------------------------

/// `(1/2πi) ∮_{|w|=ρ} f(w) dw/w` by the `nodes`-point trapezoidal rule,
/// i.e. the mean of `f` over equally spaced points of the circle.
pub fn trapezoid_circle<F>(f: F, rho: f64, nodes: usize) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let step = core::f64::consts::TAU / nodes as f64;
    let sum: Complex64 = (0..nodes)
        .map(|j| f(Complex64::from_polar(rho, step * j as f64)))
        .sum();
    sum / nodes as f64
}

/// Default circle radius: `1.2·sqrt|z|` kept strictly inside `(|z|, 1)`
/// when `|z| < 1`, `sqrt|z|` otherwise, and `1/2` at the origin.
pub fn default_contour_radius(z: Complex64) -> f64 {
    let r = z.norm();
    if r == 0.0 {
        return 0.5;
    }
    if r >= 1.0 {
        return libm::sqrt(r);
    }
    let root = libm::sqrt(r);
    let rho = 1.2 * root;
    if rho >= 1.0 {
        (root + 1.0) / 2.0
    } else if rho <= r {
        (r + root) / 2.0
    } else {
        rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourOptions {
    pub rho: Option<f64>,
    pub start_nodes: usize,
    pub max_nodes: usize,
    pub tolerance: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions { rho: None, start_nodes: 4, max_nodes: 1 << 16, tolerance: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourResult {
    pub value: Complex64,
    /// `|F_N - F_{N/2}|` at the accepted node count.
    pub error_estimate: f64,
    pub nodes: usize,
    pub rho: f64,
}

/// Hadamard product `Σ a_n b_n z^n` from `(1/2πi) ∮ f(w) g(z/w) dw/w`,
/// doubling the node count until successive estimates agree.
pub fn hadamard_contour(f: &Series, g: &Series, z: Complex64, options: ContourOptions) -> Result<ContourResult> {
    let rho = options.rho.unwrap_or_else(|| default_contour_radius(z));
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument("contour radius must be positive".into()));
    }
    let n0 = options.start_nodes;
    if n0 < 4 || !n0.is_power_of_two() {
        return Err(Error::InvalidArgument("node count must be a power of two, at least 4".into()));
    }
    let integrand = |w: Complex64| f.eval_complex(w) * g.eval_complex(z / w);
    let mut nodes = n0;
    let mut previous = trapezoid_circle(integrand, rho, nodes);
    loop {
        let doubled = nodes * 2;
        if doubled > options.max_nodes {
            return Err(Error::ToleranceNotMet {
                best: previous,
                error: f64::INFINITY,
                nodes,
            });
        }
        let current = trapezoid_circle(integrand, rho, doubled);
        let error = (current - previous).norm();
        nodes = doubled;
        if error < options.tolerance {
            return Ok(ContourResult { value: current, error_estimate: error, nodes, rho });
        }
        if nodes * 2 > options.max_nodes {
            return Err(Error::ToleranceNotMet { best: current, error, nodes });
        }
        previous = current;
    }
}
