//! Sparse exact polynomials in a fixed number of variables.
//!
//! Exponent vectors are `[u32; N]`; zero coefficients are never stored, so
//! two polynomials are equal exactly when their term maps are.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly<const N: usize> {
    terms: BTreeMap<[u32; N], Rational>,
}

/// Univariate polynomial (used for `z` after substituting `y = αz`).
pub type Poly1 = Poly<1>;
/// Bivariate polynomial in `(y, z)`.
pub type Poly2 = Poly<2>;
/// Trivariate polynomial in `(x, y, z)`.
pub type Poly3 = Poly<3>;

impl<const N: usize> Poly<N> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial([0; N], c)
    }

    pub fn monomial(exps: [u32; N], c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(exps, c);
        p
    }

    /// The `i`-th variable.
    pub fn var(i: usize) -> Self {
        let mut exps = [0; N];
        exps[i] = 1;
        Self::monomial(exps, Rational::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ([u32; N], Rational)>) -> Self {
        let mut p = Self::zero();
        for (exps, c) in terms {
            p.add_term(exps, c);
        }
        p
    }

    pub fn add_term(&mut self, exps: [u32; N], c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32; N]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; N], &Rational)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect() }
    }

    /// Multiplies by the monomial `c · vars^exps`.
    pub fn mul_monomial(&self, exps: [u32; N], c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, a)| {
                let mut shifted = *e;
                for (d, x) in shifted.iter_mut().zip(exps) {
                    *d += x;
                }
                (shifted, a * c)
            })
            .collect();
        Poly { terms }
    }

    /// Partial derivative in variable `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (e, a) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut lowered = *e;
            lowered[var] -= 1;
            out.add_term(lowered, a * BigInt::from(e[var]));
        }
        out
    }

    pub fn eval(&self, point: &[Rational; N]) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (e, a)| {
            let mut term = a.clone();
            for (x, &d) in point.iter().zip(e) {
                term *= rational::pow(x, d);
            }
            acc + term
        })
    }

    pub fn eval_f64(&self, point: &[f64; N]) -> f64 {
        self.terms
            .iter()
            .map(|(e, a)| {
                point
                    .iter()
                    .zip(e)
                    .fold(rational::to_f64(a), |acc, (&x, &d)| acc * libm::pow(x, f64::from(d)))
            })
            .sum()
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::constant(Rational::one()), |acc, _| &acc * self)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }
}

impl Poly<1> {
    /// Dense coefficients `c_0, c_1, ...` up to the degree.
    pub fn dense(&self) -> Vec<Rational> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        (0..=deg).map(|d| self.coeff(&[d])).collect()
    }
}

impl Poly<2> {
    /// Substitutes `y = α·z`, leaving a polynomial in `z`.
    pub fn substitute_y_linear(&self, alpha: &Rational) -> Poly1 {
        let mut out = Poly1::zero();
        for (&[dy, dz], a) in &self.terms {
            out.add_term([dy + dz], a * rational::pow(alpha, dy));
        }
        out
    }
}

impl<const N: usize> Add for &Poly<N> {
    type Output = Poly<N>;

    fn add(self, rhs: &Poly<N>) -> Poly<N> {
        let mut out = self.clone();
        for (e, a) in &rhs.terms {
            out.add_term(*e, a.clone());
        }
        out
    }
}

impl<const N: usize> Sub for &Poly<N> {
    type Output = Poly<N>;

    fn sub(self, rhs: &Poly<N>) -> Poly<N> {
        let mut out = self.clone();
        for (e, a) in &rhs.terms {
            out.add_term(*e, -a.clone());
        }
        out
    }
}

impl<const N: usize> Neg for &Poly<N> {
    type Output = Poly<N>;

    fn neg(self) -> Poly<N> {
        Poly { terms: self.terms.iter().map(|(e, a)| (*e, -a.clone())).collect() }
    }
}

impl<const N: usize> Mul for &Poly<N> {
    type Output = Poly<N>;

    fn mul(self, rhs: &Poly<N>) -> Poly<N> {
        let mut out = Poly::zero();
        for (e1, a) in &self.terms {
            for (e2, b) in &rhs.terms {
                let mut e = *e1;
                for (d, x) in e.iter_mut().zip(e2) {
                    *d += x;
                }
                out.add_term(e, a * b);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl<const N: usize> $tr for Poly<N> {
            type Output = Poly<N>;

            fn $method(self, rhs: Poly<N>) -> Poly<N> {
                (&self).$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);
