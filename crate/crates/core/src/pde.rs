//! The second-order PDE satisfied (in principle) by `G(x,y,z) = Σ A(v,t,s) x^v y^t z^s`.
//!
//! For `x, z != 0` it reads
//!
//! ```text
//! A G_yy + 2B G_yz + C G_zz + D G_y + (E' - 1/x) G_z + F G = 0
//! A  = y²(y-1)            B  = ½ y(2z²-y-z)        C = z(z²-y)
//! D  = y(2-k)(2z-1)       E' = (2-k)(2z²-y)        F = (k²-3k+2) z
//! ```
//!
//! Its type at a point `(y, z)` follows the sign of `B² - AC`. Everything
//! here derives from the coefficient list above; the hand-expanded
//! discriminant and its `y = αz` form are only evaluated as claims to audit.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::poly::{Poly1, Poly2, Poly3};
use crate::rational::{self, frac, int, Rational};
use crate::table::{CoeffTable, EnsembleParams};
use crate::{Error, Result};

const Y: usize = 0;
const Z: usize = 1;

/// Width below which irrational roots of the printed quadratic are reported.
pub const ROOT_INTERVAL_WIDTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nature {
    Hyperbolic,
    Parabolic,
    Elliptic,
}

impl Nature {
    /// Positive discriminant is hyperbolic, zero parabolic, negative elliptic.
    pub fn from_sign(sign: core::cmp::Ordering) -> Self {
        match sign {
            core::cmp::Ordering::Greater => Nature::Hyperbolic,
            core::cmp::Ordering::Equal => Nature::Parabolic,
            core::cmp::Ordering::Less => Nature::Elliptic,
        }
    }

    pub fn of_rational(value: &Rational) -> Self {
        Self::from_sign(value.cmp(&Rational::zero()))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Nature::Hyperbolic => "hyperbolic",
            Nature::Parabolic => "parabolic",
            Nature::Elliptic => "elliptic",
        }
    }
}

impl core::fmt::Display for Nature {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The six coefficient polynomials in `(y, z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdeCoefficients {
    pub a: Poly2,
    pub b: Poly2,
    pub c: Poly2,
    pub d: Poly2,
    pub e_prime: Poly2,
    pub f: Poly2,
}

fn yz(dy: u32, dz: u32, c: Rational) -> Poly2 {
    Poly2::monomial([dy, dz], c)
}

pub fn pde_coefficients(params: &EnsembleParams) -> PdeCoefficients {
    let k = int(i64::from(params.k()));
    let two_minus_k = int(2) - &k;
    let a = Poly2::from_terms([([3, 0], int(1)), ([2, 0], int(-1))]);
    let b = Poly2::from_terms([([1, 2], int(1)), ([2, 0], frac(-1, 2)), ([1, 1], frac(-1, 2))]);
    let c = Poly2::from_terms([([0, 3], int(1)), ([1, 1], int(-1))]);
    let d = Poly2::from_terms([([1, 1], int(2)), ([1, 0], int(-1))]).scale(&two_minus_k);
    let e_prime = Poly2::from_terms([([0, 2], int(2)), ([1, 0], int(-1))]).scale(&two_minus_k);
    let f = yz(0, 1, &k * &k - int(3) * &k + int(2));
    PdeCoefficients { a, b, c, d, e_prime, f }
}

/// `B² - AC`; `A`, `B`, `C` do not involve `k`, so neither does this.
pub fn discriminant(params: &EnsembleParams) -> Poly2 {
    let PdeCoefficients { a, b, c, .. } = pde_coefficients(params);
    &(&b * &b) - &(&a * &c)
}

fn discriminant_poly() -> Poly2 {
    // Any k gives the same polynomial.
    discriminant(&EnsembleParams::with_checks(1).expect("m = 1 is valid"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointClassification {
    pub y: Rational,
    pub z: Rational,
    pub discriminant: Rational,
    pub nature: Nature,
}

/// Exact classification from the exact sign of `B² - AC`.
pub fn classify_point(y: &Rational, z: &Rational) -> PointClassification {
    let discriminant = discriminant_poly().eval(&[y.clone(), z.clone()]);
    PointClassification {
        y: y.clone(),
        z: z.clone(),
        nature: Nature::of_rational(&discriminant),
        discriminant,
    }
}

/// Floating-point classification; `|B² - AC| <= tolerance` counts as
/// parabolic. A zero tolerance only labels exact zeros parabolic.
pub fn classify_point_f64(y: f64, z: f64, tolerance: f64) -> (Nature, f64) {
    let value = discriminant_poly().eval_f64(&[y, z]);
    let nature = if libm::fabs(value) <= tolerance {
        Nature::Parabolic
    } else if value > 0.0 {
        Nature::Hyperbolic
    } else {
        Nature::Elliptic
    };
    (nature, value)
}

/// Classifies the evenly spaced `grid_n × grid_n` rational grid spanning
/// both closed ranges, `y` varying slowest.
pub fn region_map(
    y_range: (&Rational, &Rational),
    z_range: (&Rational, &Rational),
    grid_n: u32,
) -> Result<Vec<PointClassification>> {
    if grid_n < 2 {
        return Err(Error::InvalidArgument("a region grid needs at least 2 points per axis".into()));
    }
    let disc = discriminant_poly();
    let steps = BigInt::from(grid_n - 1);
    let y_step = (y_range.1 - y_range.0) / &steps;
    let z_step = (z_range.1 - z_range.0) / &steps;
    let mut points = Vec::with_capacity((grid_n * grid_n) as usize);
    for i in 0..grid_n {
        let y = y_range.0 + &y_step * BigInt::from(i);
        for j in 0..grid_n {
            let z = z_range.0 + &z_step * BigInt::from(j);
            let discriminant = disc.eval(&[y.clone(), z.clone()]);
            points.push(PointClassification {
                y: y.clone(),
                nature: Nature::of_rational(&discriminant),
                z,
                discriminant,
            });
        }
    }
    Ok(points)
}

/// `f(z) = (4-α)z² - 3(1+α)z + 1 + α + α²` as printed for the `y = αz` case analysis.
pub fn printed_f(alpha: &Rational) -> Poly1 {
    let one = Rational::one();
    Poly1::from_terms([
        ([2], int(4) - alpha),
        ([1], int(-3) * (&one + alpha)),
        ([0], &one + alpha + alpha * alpha),
    ])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaSubstitution {
    pub alpha: Rational,
    /// `4(B² - AC)` with `y = αz`, derived from the coefficient list.
    pub exact: Poly1,
    /// `α² z⁴ f(z)` with the printed `f`.
    pub printed: Poly1,
}

impl AlphaSubstitution {
    pub fn agrees(&self) -> bool {
        self.exact == self.printed
    }

    pub fn agrees_at(&self, z: &Rational) -> bool {
        self.exact.eval(&[z.clone()]) == self.printed.eval(&[z.clone()])
    }
}

pub fn alpha_substitution(alpha: &Rational) -> AlphaSubstitution {
    let exact = discriminant_poly().scale(&int(4)).substitute_y_linear(alpha);
    let printed = printed_f(alpha).mul_monomial([4], &(alpha * alpha));
    AlphaSubstitution { alpha: alpha.clone(), exact, printed }
}

/// Discriminant of the printed quadratic, in its expanded and factored forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaDiscriminant {
    pub expanded: Rational,
    pub factored: Rational,
}

/// `9(1+α)² - 4(4-α)(1+α+α²) = (α-1)(4α²+α+7) = 4α³ - 3α² + 6α - 7`.
pub fn alpha_discriminant(alpha: &Rational) -> Rational {
    let forms = alpha_discriminant_forms(alpha);
    assert_eq!(forms.expanded, forms.factored, "polynomial identity violated");
    forms.factored
}

pub fn alpha_discriminant_forms(alpha: &Rational) -> AlphaDiscriminant {
    let one = Rational::one();
    let sum = &one + alpha;
    let expanded = int(9) * &sum * &sum - int(4) * (int(4) - alpha) * (&sum + alpha * alpha);
    let factored = (alpha - &one) * (int(4) * alpha * alpha + alpha + int(7));
    AlphaDiscriminant { expanded, factored }
}

/// A real root of the printed quadratic: exact, or an isolating interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootLoc {
    Exact(Rational),
    Interval { lo: Rational, hi: Rational },
}

impl RootLoc {
    pub fn approx(&self) -> f64 {
        match self {
            RootLoc::Exact(r) => rational::to_f64(r),
            RootLoc::Interval { lo, hi } => (rational::to_f64(lo) + rational::to_f64(hi)) / 2.0,
        }
    }

    /// Whether `z` lies strictly below / above the root; `None` if `z` falls
    /// inside the isolating interval (or equals an exact root).
    pub fn compare(&self, z: &Rational) -> Option<core::cmp::Ordering> {
        use core::cmp::Ordering::*;
        match self {
            RootLoc::Exact(r) => match z.cmp(r) {
                Equal => None,
                other => Some(other),
            },
            RootLoc::Interval { lo, hi } => {
                if z < lo {
                    Some(Less)
                } else if z > hi {
                    Some(Greater)
                } else {
                    None
                }
            }
        }
    }
}

impl core::fmt::Display for RootLoc {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RootLoc::Exact(r) => write!(f, "{r}"),
            RootLoc::Interval { lo, hi } => {
                write!(f, "[{:.12}, {:.12}]", rational::to_f64(lo), rational::to_f64(hi))
            }
        }
    }
}

/// Real roots of the printed `f`, ascending. A double root appears once;
/// `f ≡ const` has none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrintedRoots {
    pub roots: Vec<RootLoc>,
    pub double: bool,
}

pub fn printed_f_roots(alpha: &Rational) -> PrintedRoots {
    let f = printed_f(alpha);
    let (c, b, a) = (f.coeff(&[0]), f.coeff(&[1]), f.coeff(&[2]));
    if a.is_zero() {
        let roots = if b.is_zero() { Vec::new() } else { alloc::vec![RootLoc::Exact(-c / b)] };
        return PrintedRoots { roots, double: false };
    }
    let disc = &b * &b - int(4) * &a * &c;
    let two_a = int(2) * &a;
    if disc.is_negative() {
        return PrintedRoots { roots: Vec::new(), double: false };
    }
    if disc.is_zero() {
        return PrintedRoots { roots: alloc::vec![RootLoc::Exact(-&b / &two_a)], double: true };
    }
    let mut roots = match exact_sqrt(&disc) {
        Some(root) => alloc::vec![
            RootLoc::Exact((-&b - &root) / &two_a),
            RootLoc::Exact((-&b + &root) / &two_a),
        ],
        None => {
            let sqrt = libm::sqrt(rational::to_f64(&disc));
            let (a_f, b_f) = (rational::to_f64(&a), rational::to_f64(&b));
            let guesses = [(-b_f - sqrt) / (2.0 * a_f), (-b_f + sqrt) / (2.0 * a_f)];
            let separation = libm::fabs(guesses[1] - guesses[0]);
            guesses.iter().map(|&g| isolate_root(&f, g, separation / 4.0)).collect()
        }
    };
    roots.sort_by(|l, r| l.approx().total_cmp(&r.approx()));
    PrintedRoots { roots, double: false }
}

fn exact_sqrt(value: &Rational) -> Option<Rational> {
    let (n, d) = (value.numer(), value.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

/// Dyadic rational within `2^-40` of `x`.
fn approx_rational(x: f64) -> Rational {
    const SCALE: f64 = (1u64 << 40) as f64;
    Rational::new(BigInt::from(libm::round(x * SCALE) as i128), BigInt::from(1u64 << 40))
}

/// Brackets the simple root near `guess` (no other root within `radius`) and
/// bisects with exact sign evaluation until narrower than [`ROOT_INTERVAL_WIDTH`].
fn isolate_root(f: &Poly1, guess: f64, radius: f64) -> RootLoc {
    let sign = |z: &Rational| f.eval(&[z.clone()]).cmp(&Rational::zero());
    let mut delta = (1e-6 * libm::fmax(1.0, libm::fabs(guess))).min(radius);
    let (mut lo, mut hi) = loop {
        let lo = approx_rational(guess - delta);
        let hi = approx_rational(guess + delta);
        if sign(&lo) != sign(&hi) {
            break (lo, hi);
        }
        delta *= 2.0;
    };
    let width = approx_rational(ROOT_INTERVAL_WIDTH / 2.0);
    let lo_sign = sign(&lo);
    while &hi - &lo >= width {
        let mid = (&lo + &hi) / BigInt::from(2);
        match sign(&mid) {
            core::cmp::Ordering::Equal => return RootLoc::Exact(mid),
            s if s == lo_sign => lo = mid,
            _ => hi = mid,
        }
    }
    RootLoc::Interval { lo, hi }
}

/// Type of `α² z⁴ f(z)` at `z` for the printed `f`.
pub fn printed_nature(alpha: &Rational, z: &Rational) -> Nature {
    Nature::of_rational(&alpha_substitution(alpha).printed.eval(&[z.clone()]))
}

/// The six cases of the published `y = αz` analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaCase {
    /// `α = 0`: parabolic everywhere.
    Zero,
    /// `0 < α < 1`: hyperbolic everywhere.
    BelowOne,
    /// `α = 1`: parabolic at the double root, hyperbolic elsewhere.
    One,
    /// `1 < α < 4`: elliptic between the roots, hyperbolic outside.
    BetweenOneAndFour,
    /// `α = 4`: `f` is linear, elliptic beyond its root `7/5`.
    Four,
    /// `α > 4`: hyperbolic between the roots, elliptic outside.
    AboveFour,
}

impl AlphaCase {
    pub fn of(alpha: &Rational) -> Option<Self> {
        let (one, four) = (Rational::one(), int(4));
        Some(if alpha.is_negative() {
            return None;
        } else if alpha.is_zero() {
            AlphaCase::Zero
        } else if *alpha < one {
            AlphaCase::BelowOne
        } else if *alpha == one {
            AlphaCase::One
        } else if *alpha < four {
            AlphaCase::BetweenOneAndFour
        } else if *alpha == four {
            AlphaCase::Four
        } else {
            AlphaCase::AboveFour
        })
    }

    pub fn index(self) -> u8 {
        self as u8
    }
}

/// The published parabolic point for `α = 1` (the Figure 2 caption `(z-3)²`).
pub fn published_alpha_one_root() -> Rational {
    int(3)
}

/// Type the published case table assigns to `(α, z)` for `z != 0`, using the
/// roots of the printed `f` (and the published `z = 3` for `α = 1`). `None`
/// when `α < 0`, `z = 0`, or `z` sits inside a root's isolating interval.
pub fn published_case_nature(alpha: &Rational, z: &Rational) -> Option<Nature> {
    use core::cmp::Ordering::*;
    if z.is_zero() {
        return None;
    }
    let case = AlphaCase::of(alpha)?;
    match case {
        AlphaCase::Zero => Some(Nature::Parabolic),
        AlphaCase::BelowOne => Some(Nature::Hyperbolic),
        AlphaCase::One => Some(if *z == published_alpha_one_root() {
            Nature::Parabolic
        } else {
            Nature::Hyperbolic
        }),
        AlphaCase::Four => Some(match z.cmp(&frac(7, 5)) {
            Greater => Nature::Elliptic,
            Equal => Nature::Parabolic,
            Less => Nature::Hyperbolic,
        }),
        AlphaCase::BetweenOneAndFour | AlphaCase::AboveFour => {
            let roots = printed_f_roots(alpha).roots;
            let [z1, z2] = roots.as_slice() else {
                return None;
            };
            let (inside, outside) = if case == AlphaCase::BetweenOneAndFour {
                (Nature::Elliptic, Nature::Hyperbolic)
            } else {
                (Nature::Hyperbolic, Nature::Elliptic)
            };
            match (z1.compare(z)?, z2.compare(z)?) {
                (Less, _) | (_, Greater) => Some(outside),
                _ => Some(inside),
            }
        }
    }
}

/// The first printed line for `(2B)² - 4AC`: `y²(z²-y-z)² - y²(y-1)z(z²-y)`.
pub fn printed_discriminant_first_line() -> Poly2 {
    let y = Poly2::var(Y);
    let z = Poly2::var(Z);
    let y2 = y.pow(2);
    let inner = &(&z.pow(2) - &y) - &z;
    let first = &y2 * &inner.pow(2);
    let second = &(&y2 * &(&y - &Poly2::constant(Rational::one()))) * &(&z * &(&z.pow(2) - &y));
    &first - &second
}

/// The printed expansion `y²(4z⁴ - 3z³ + z² + y² - yz³ - 3yz³ + yz)`, term by term.
pub fn printed_discriminant_expansion() -> Poly2 {
    let inner = Poly2::from_terms([
        ([0, 4], int(4)),
        ([0, 3], int(-3)),
        ([0, 2], int(1)),
        ([2, 0], int(1)),
        ([1, 3], int(-1)),
        ([1, 3], int(-3)),
        ([1, 1], int(1)),
    ]);
    inner.mul_monomial([2, 0], &Rational::one())
}

/// One sampled point of the printed-algebra audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionAuditRow {
    pub y: Rational,
    pub z: Rational,
    /// `4(B² - AC)` from the coefficient list.
    pub exact: Rational,
    pub first_line: Rational,
    pub expansion: Rational,
    /// `α² z⁴ f(z)` with `α = y/z`; `None` at `z = 0`.
    pub alpha_form: Option<Rational>,
}

impl ExpansionAuditRow {
    pub fn first_line_agrees(&self) -> bool {
        self.first_line == self.exact
    }

    pub fn expansion_agrees(&self) -> bool {
        self.expansion == self.exact
    }

    pub fn alpha_form_agrees(&self) -> Option<bool> {
        self.alpha_form.as_ref().map(|v| *v == self.exact)
    }
}

pub fn expansion_audit(points: &[(Rational, Rational)]) -> Vec<ExpansionAuditRow> {
    let exact = discriminant_poly().scale(&int(4));
    let first = printed_discriminant_first_line();
    let expansion = printed_discriminant_expansion();
    points
        .iter()
        .map(|(y, z)| {
            let at = [y.clone(), z.clone()];
            let alpha_form = (!z.is_zero()).then(|| {
                let alpha = y / z;
                alpha_substitution(&alpha).printed.eval(&[z.clone()])
            });
            ExpansionAuditRow {
                y: y.clone(),
                z: z.clone(),
                exact: exact.eval(&at),
                first_line: first.eval(&at),
                expansion: expansion.eval(&at),
                alpha_form,
            }
        })
        .collect()
}

/// Random rational with numerator in `[-max_num, max_num]` and denominator
/// in `[1, max_den]`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    let p = rng.random_range(-max_num..=max_num);
    let q = rng.random_range(1..=max_den);
    frac(p, q)
}

// ---------------------------------------------------------------------------
// Residual of the PDE against a coefficient table.
// ---------------------------------------------------------------------------

/// `coeff · ∂_y^dy ∂_z^dz`, with `coeff` a polynomial in `(x, y, z)`.
#[derive(Debug, Clone)]
pub struct OperatorTerm {
    pub coeff: Poly3,
    pub dy: u32,
    pub dz: u32,
}

fn lift(p: &Poly2) -> Poly3 {
    Poly3::from_terms(p.terms().map(|(&[dy, dz], c)| ([0, dy, dz], c.clone())))
}

/// `z ∂_z` on the left; `xz{F + D ∂_y + E' ∂_z + A ∂_yy + C ∂_zz + 2B ∂_yz}`
/// on the right.
pub fn operator_terms(params: &EnsembleParams) -> (OperatorTerm, Vec<OperatorTerm>) {
    let c = pde_coefficients(params);
    let xz = |p: &Poly2| lift(p).mul_monomial([1, 0, 1], &Rational::one());
    let lhs = OperatorTerm { coeff: Poly3::monomial([0, 0, 1], Rational::one()), dy: 0, dz: 1 };
    let rhs = alloc::vec![
        OperatorTerm { coeff: xz(&c.f), dy: 0, dz: 0 },
        OperatorTerm { coeff: xz(&c.d), dy: 1, dz: 0 },
        OperatorTerm { coeff: xz(&c.e_prime), dy: 0, dz: 1 },
        OperatorTerm { coeff: xz(&c.a), dy: 2, dz: 0 },
        OperatorTerm { coeff: xz(&c.c), dy: 0, dz: 2 },
        OperatorTerm { coeff: xz(&c.b.scale(&int(2))), dy: 1, dz: 1 },
    ];
    (lhs, rhs)
}

fn apply(term: &OperatorTerm, g: &Poly3) -> Poly3 {
    let mut d = g.clone();
    for _ in 0..term.dy {
        d = d.derivative(1);
    }
    for _ in 0..term.dz {
        d = d.derivative(2);
    }
    &term.coeff * &d
}

/// Truncation box `v <= vmax`, `t <= tmax`, `s <= smax`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub vmax: u32,
    pub tmax: u32,
    pub smax: u32,
}

impl Window {
    pub fn contains(&self, [v, t, s]: [i64; 3]) -> bool {
        v <= i64::from(self.vmax) && t <= i64::from(self.tmax) && s <= i64::from(self.smax)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualMonomial {
    pub v: u32,
    pub t: u32,
    pub s: u32,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualReport {
    pub window: Window,
    /// Non-zero residual coefficients whose every reference lies in the window.
    pub nonzero: Vec<ResidualMonomial>,
    /// Non-zero residual coefficients touched by truncation.
    pub excluded: Vec<ResidualMonomial>,
    /// Number of interior monomials checked.
    pub interior_checked: usize,
}

impl ResidualReport {
    pub fn is_clean(&self) -> bool {
        self.nonzero.is_empty()
    }
}

/// `G` restricted to the window.
pub fn generating_polynomial(table: &CoeffTable, window: Window) -> Poly3 {
    Poly3::from_terms(
        table
            .nonzero_entries()
            .filter(|&(v, t, s, _)| window.contains([v.into(), t.into(), s.into()]))
            .map(|(v, t, s, a)| ([v, t, s], a.clone())),
    )
}

/// Whether the residual coefficient at `(v,t,s)` depends only on
/// coefficients inside the window. Negative references are structurally
/// zero and never count as truncated.
pub fn is_interior(lhs: &OperatorTerm, rhs: &[OperatorTerm], window: Window, at: [u32; 3]) -> bool {
    let at = at.map(i64::from);
    if !window.contains(at) {
        return false;
    }
    core::iter::once(lhs).chain(rhs).all(|term| {
        term.coeff.terms().all(|(&[cx, cy, cz], _)| {
            let reference = [
                at[0] - i64::from(cx),
                at[1] - i64::from(cy) + i64::from(term.dy),
                at[2] - i64::from(cz) + i64::from(term.dz),
            ];
            reference.iter().any(|&i| i < 0) || window.contains(reference)
        })
    })
}

/// Residual polynomial `z G_z - xz{...}G` for an arbitrary `G`.
pub fn residual_polynomial(params: &EnsembleParams, g: &Poly3) -> Poly3 {
    let (lhs, rhs) = operator_terms(params);
    rhs.iter().fold(apply(&lhs, g), |acc, term| &acc - &apply(term, g))
}

/// Applies the PDE operator to the truncated `G` of `table` and sorts the
/// non-zero residual coefficients into interior and truncation-affected.
pub fn pde_residual(table: &CoeffTable, window: Window) -> Result<ResidualReport> {
    if window.vmax > table.vmax() {
        return Err(Error::Coverage { missing_v: table.vmax() + 1 });
    }
    let g = generating_polynomial(table, window);
    Ok(classify_residual(table.params(), &residual_polynomial(table.params(), &g), window))
}

pub fn classify_residual(params: &EnsembleParams, residual: &Poly3, window: Window) -> ResidualReport {
    let (lhs, rhs) = operator_terms(params);
    let mut report = ResidualReport { window, nonzero: Vec::new(), excluded: Vec::new(), interior_checked: 0 };
    for v in 0..=window.vmax {
        for t in 0..=window.tmax {
            for s in 0..=window.smax {
                report.interior_checked += usize::from(is_interior(&lhs, &rhs, window, [v, t, s]));
            }
        }
    }
    for (&[v, t, s], value) in residual.terms() {
        let monomial = ResidualMonomial { v, t, s, value: value.clone() };
        if is_interior(&lhs, &rhs, window, [v, t, s]) {
            report.nonzero.push(monomial);
        } else {
            report.excluded.push(monomial);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::BaseConfig;

    fn params(m: u32) -> EnsembleParams {
        EnsembleParams::with_checks(m).unwrap()
    }

    #[test]
    fn coefficient_spot_values() {
        let c = pde_coefficients(&params(5));
        assert_eq!(c.a.eval(&[int(2), int(17)]), int(4));
        assert_eq!(c.f.eval(&[int(0), int(1)]), int(20));
        assert_eq!(c.b.eval(&[int(2), int(1)]), int(-1));
        assert_eq!(c.d.eval(&[int(1), int(1)]), int(-4));
        assert_eq!(c.e_prime.eval(&[int(1), int(1)]), int(-4));
    }

    #[test]
    fn discriminant_spot_values() {
        let d = discriminant(&params(5));
        assert_eq!(d.eval(&[int(2), int(1)]), int(5));
        assert_eq!(d.eval(&[int(3), int(2)]), frac(-63, 4));
        for z in -5..5 {
            assert!(d.eval(&[int(0), frac(z, 3)]).is_zero());
        }
        assert_eq!(discriminant(&params(5)), discriminant(&params(12)));
    }

    #[test]
    fn spot_classifications() {
        assert_eq!(classify_point(&int(2), &int(1)).nature, Nature::Hyperbolic);
        assert_eq!(classify_point(&int(2), &int(1)).discriminant, int(5));
        assert_eq!(classify_point(&int(2), &int(2)).nature, Nature::Parabolic);
        assert_eq!(classify_point(&int(3), &int(2)).nature, Nature::Elliptic);
        assert_eq!(classify_point_f64(2.0, 1.0, 0.0).0, Nature::Hyperbolic);
        assert_eq!(classify_point_f64(2.0, 2.0, 0.0).0, Nature::Parabolic);
        assert_eq!(classify_point_f64(2.0, 2.0 + 1e-9, 1e-6).0, Nature::Parabolic);
    }

    #[test]
    fn region_grid() {
        let grid = region_map((&int(1), &int(4)), (&int(1), &int(4)), 4).unwrap();
        assert_eq!(grid.len(), 16);
        let natures: alloc::collections::BTreeSet<_> = grid.iter().map(|p| p.nature).collect();
        assert_eq!(natures.len(), 3);
        let axis = region_map((&int(0), &int(2)), (&int(-3), &int(3)), 5).unwrap();
        assert!(axis.iter().filter(|p| p.y.is_zero()).all(|p| p.nature == Nature::Parabolic));
        assert!(region_map((&int(0), &int(1)), (&int(0), &int(1)), 1).is_err());
    }

    #[test]
    fn alpha_discriminant_values() {
        assert!(alpha_discriminant(&int(1)).is_zero());
        assert_eq!(alpha_discriminant(&int(0)), int(-7));
        assert_eq!(alpha_discriminant(&int(2)), int(25));
    }

    #[test]
    fn alpha_zero_is_identically_zero() {
        let sub = alpha_substitution(&int(0));
        assert!(sub.exact.is_zero());
        assert!(sub.printed.is_zero());
    }

    #[test]
    fn exact_alpha_form_is_the_derived_quartic() {
        // 4(B²-AC) at y = αz equals α²z⁴(1-α)(4z² - 4αz + 1 - α).
        for alpha in [frac(1, 2), int(2), int(-3), frac(7, 3)] {
            let one = Rational::one();
            let expected = Poly1::from_terms([
                ([2], int(4)),
                ([1], int(-4) * &alpha),
                ([0], &one - &alpha),
            ])
            .mul_monomial([4], &(&alpha * &alpha * (&one - &alpha)));
            assert_eq!(alpha_substitution(&alpha).exact, expected);
        }
    }

    #[test]
    fn printed_roots() {
        // α = 1: 3(z-1)², double root at 1 rather than the captioned 3.
        let one = printed_f_roots(&int(1));
        assert!(one.double);
        assert_eq!(one.roots, alloc::vec![RootLoc::Exact(int(1))]);
        // α = 2: (2z-7)(z-1).
        assert_eq!(printed_f_roots(&int(2)).roots, alloc::vec![RootLoc::Exact(int(1)), RootLoc::Exact(frac(7, 2))]);
        // α = 4: linear, root 7/5.
        assert_eq!(printed_f_roots(&int(4)).roots, alloc::vec![RootLoc::Exact(frac(7, 5))]);
        // α = 5: -z² - 18z + 31, roots -9 ± √112.
        let five = printed_f_roots(&int(5)).roots;
        assert_eq!(five.len(), 2);
        let sqrt112 = libm::sqrt(112.0);
        for (root, expected) in five.iter().zip([-9.0 - sqrt112, -9.0 + sqrt112]) {
            let RootLoc::Interval { lo, hi } = root else { panic!("irrational root") };
            assert!(rational::to_f64(&(hi - lo)) < ROOT_INTERVAL_WIDTH);
            assert!(rational::to_f64(lo) <= expected && expected <= rational::to_f64(hi));
        }
        assert!(printed_f_roots(&frac(1, 2)).roots.is_empty());
    }

    #[test]
    fn printed_sign_pattern_follows_published_cases() {
        let zs: Vec<Rational> = (-40..=40).filter(|&i| i != 0).map(|i| frac(i, 4)).collect();
        for alpha in [frac(1, 2), int(2), int(4), int(5), frac(3, 2), int(9)] {
            for z in &zs {
                let Some(claim) = published_case_nature(&alpha, z) else { continue };
                assert_eq!(printed_nature(&alpha, z), claim, "alpha={alpha} z={z}");
            }
        }
        // α = 1: the printed f is parabolic at its own double root z = 1 and
        // hyperbolic elsewhere; the published table puts the point at z = 3.
        assert_eq!(printed_nature(&int(1), &int(1)), Nature::Parabolic);
        assert_eq!(printed_nature(&int(1), &int(3)), Nature::Hyperbolic);
        assert_eq!(published_case_nature(&int(1), &int(3)), Some(Nature::Parabolic));
    }

    #[test]
    fn printed_expansion_is_not_the_exact_discriminant() {
        let exact = discriminant_poly().scale(&int(4));
        assert_ne!(printed_discriminant_expansion(), exact);
        assert_ne!(printed_discriminant_first_line(), exact);
        let rows = expansion_audit(&[(int(2), int(1)), (int(0), int(3))]);
        assert_eq!(rows[0].exact, int(20));
        assert!(rows[1].expansion_agrees() && rows[1].first_line_agrees());
    }

    #[test]
    fn residual_of_empty_table_is_zero() {
        let window = Window { vmax: 3, tmax: 3, smax: 3 };
        let report = classify_residual(&params(3), &residual_polynomial(&params(3), &Poly3::zero()), window);
        assert!(report.is_clean() && report.excluded.is_empty());
    }

    #[test]
    fn interior_window_excludes_truncated_levels() {
        let p = params(5);
        let (lhs, rhs) = operator_terms(&p);
        let window = Window { vmax: 3, tmax: 5, smax: 5 };
        assert!(is_interior(&lhs, &rhs, window, [3, 2, 2]));
        assert!(!is_interior(&lhs, &rhs, window, [4, 2, 2]));
        assert!(!is_interior(&lhs, &rhs, window, [1, 6, 0]));
    }

    #[test]
    fn residual_on_a_real_table_reports_monomials() {
        let table = CoeffTable::fill(params(3), 3, BaseConfig::Default).unwrap();
        let report = pde_residual(&table, Window { vmax: 3, tmax: 3, smax: 3 }).unwrap();
        // x z² term from F·A(0,0,0) survives: F = (k²-3k+2)z with k = 4.
        assert!(report.nonzero.iter().any(|r| (r.v, r.t, r.s) == (1, 0, 2) && r.value == int(-6)));
        assert!(report.excluded.iter().all(|r| r.v == 4));
    }
}
