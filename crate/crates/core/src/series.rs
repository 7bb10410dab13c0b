//! Truncated formal power series with exact rational coefficients.
//!
//! A [`Series`] of truncation order `N` stores the coefficients of
//! `x^0 ..= x^N`; everything above is unknown and treated as zero. Each
//! operation returns the largest order its inputs determine, so shrinking
//! (left shift, differentiation) and growing (right shift, integration)
//! happen explicitly, never by padding with made-up zeros.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::combinatorics::factorial;
use crate::rational::{self, from_biguint, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Multiply by `x`.
    Right,
    /// Drop `a_0` and divide by `x`.
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Calculus {
    Differentiate,
    Integrate,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Series {
    coeffs: Vec<Rational>,
}

impl Series {
    /// Builds a series whose truncation order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a series needs at least the constant coefficient".into(),
            ));
        }
        Ok(Series { coeffs })
    }

    pub fn from_ints(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Series { coeffs: vec![Rational::zero(); order + 1] }
    }

    /// The constant `1`, truncated at `order`.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// `1/(1-x)`, all coefficients one.
    pub fn ones(order: usize) -> Self {
        Series { coeffs: vec![Rational::one(); order + 1] }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Exact coefficient of `x^n`.
    pub fn coef(&self, n: usize) -> Result<&Rational> {
        self.coeffs
            .get(n)
            .ok_or(Error::OutOfRange { index: n, order: self.order() })
    }

    /// Re-truncates to a lower (or equal) order.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::InvalidArgument(alloc::format!(
                "cannot extend order {} to {order} without inventing coefficients",
                self.order()
            )));
        }
        Ok(Series { coeffs: self.coeffs[..=order].to_vec() })
    }

    pub fn shift(&self, direction: Direction) -> Result<Self> {
        match direction {
            Direction::Right => Ok(self.shift_right()),
            Direction::Left => self.shift_left(),
        }
    }

    pub fn shift_right(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Series { coeffs }
    }

    pub fn shift_left(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::InvalidArgument(
                "left shift needs truncation order at least 1".into(),
            ));
        }
        Ok(Series { coeffs: self.coeffs[1..].to_vec() })
    }

    pub fn calculus(&self, mode: Calculus) -> Self {
        match mode {
            Calculus::Differentiate => self.differentiate(),
            Calculus::Integrate => self.integrate(),
        }
    }

    /// Derivative; the derivative of an order-0 series is the order-0 zero.
    pub fn differentiate(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(n, a)| a * BigInt::from(n + 1))
            .collect();
        Series { coeffs }
    }

    /// Antiderivative vanishing at zero.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a / BigInt::from(k + 1)),
        );
        Series { coeffs }
    }

    /// Coefficient-wise sum over the shorter truncation.
    pub fn add(&self, other: &Series) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Series { coeffs }
    }

    /// `A(λx)`: coefficient `n` becomes `λ^n a_n`.
    pub fn scale(&self, lambda: &Rational) -> Self {
        let mut power = Rational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let c = a * &power;
                power *= lambda;
                c
            })
            .collect();
        Series { coeffs }
    }

    /// `(1-x)A(x)`.
    pub fn difference(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(self.coeffs[0].clone());
        coeffs.extend(self.coeffs.windows(2).map(|w| &w[1] - &w[0]));
        Series { coeffs }
    }

    /// `A(x)/(1-x)`.
    pub fn partial_sum(&self) -> Self {
        let mut acc = Rational::zero();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                acc += a;
                acc.clone()
            })
            .collect();
        Series { coeffs }
    }

    /// Cauchy product truncated at the smaller order.
    ///
    /// Both operands are brought to integer numerators over a common
    /// denominator first so the inner sums run on big integers and each
    /// output coefficient is reduced once.
    pub fn convolve(&self, other: &Series) -> Self {
        let order = self.order().min(other.order());
        let (lhs, lhs_den) = common_denominator(&self.coeffs[..=order]);
        let (rhs, rhs_den) = common_denominator(&other.coeffs[..=order]);
        let den = lhs_den * rhs_den;
        let coeffs = (0..=order)
            .map(|n| {
                let mut sum = BigInt::zero();
                for k in 0..=n {
                    let (a, b) = (&lhs[k], &rhs[n - k]);
                    if !a.is_zero() && !b.is_zero() {
                        sum += a * b;
                    }
                }
                Rational::new(sum, den.clone())
            })
            .collect();
        Series { coeffs }
    }

    /// Coefficient-wise (Hadamard) product over the shorter truncation.
    pub fn hadamard(&self, other: &Series) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .collect();
        Series { coeffs }
    }

    /// Exact value of the truncated polynomial at `x`.
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Truncated polynomial at a complex point, coefficients rounded to `f64`.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + rational::to_f64(c))
    }
}

impl Index<usize> for Series {
    type Output = Rational;

    fn index(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }
}

fn common_denominator(coeffs: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let numers = coeffs
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    (numers, den)
}

/// `e^x - 1 - x` truncated at `order`: coefficient `1/k!` for `k >= 2`.
pub fn poisson_block_base(order: usize) -> Series {
    let coeffs = (0..=order)
        .map(|k| {
            if k < 2 {
                Rational::zero()
            } else {
                Rational::new(BigInt::one(), BigInt::from(factorial(k as u32)))
            }
        })
        .collect();
    Series { coeffs }
}

/// `(e^x - 1 - x)^t` truncated at `order`, by repeated exact convolution.
pub fn poisson_block_series(t: u32, order: usize) -> Series {
    let base = poisson_block_base(order);
    (0..t).fold(Series::one(order), |acc, _| acc.convolve(&base))
}

/// The powers `(e^x - 1 - x)^t` for `t = 0..=tmax`, sharing the convolutions.
pub fn poisson_block_powers(tmax: u32, order: usize) -> Vec<Series> {
    let base = poisson_block_base(order);
    let mut powers = Vec::with_capacity(tmax as usize + 1);
    powers.push(Series::one(order));
    for t in 1..=tmax as usize {
        let next = powers[t - 1].convolve(&base);
        powers.push(next);
    }
    powers
}

/// `n! * coef{series, x^n}`; an integer whenever the series is an EGF.
pub fn egf_count(series: &Series, n: usize) -> Result<Rational> {
    Ok(series.coef(n)? * from_biguint(factorial(n as u32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn s(c: &[i64]) -> Series {
        Series::from_ints(c).unwrap()
    }

    fn q(c: &[(i64, i64)]) -> Series {
        Series::new(c.iter().map(|&(p, d)| frac(p, d)).collect()).unwrap()
    }

    #[test]
    fn shifts() {
        assert_eq!(s(&[1, 2, 3]).shift(Direction::Right).unwrap(), s(&[0, 1, 2, 3]));
        assert_eq!(s(&[5, 7, 9]).shift(Direction::Left).unwrap(), s(&[7, 9]));
        let a = s(&[4, -2]);
        assert_eq!(a.shift_right().shift_left().unwrap(), a);
        assert!(matches!(s(&[1]).shift_left(), Err(Error::InvalidArgument(_))));
        assert!(Series::new(Vec::new()).is_err());
    }

    #[test]
    fn calculus_pair() {
        assert_eq!(s(&[1, 1, 1]).calculus(Calculus::Differentiate), s(&[1, 2]));
        assert_eq!(s(&[1, 1]).calculus(Calculus::Integrate), q(&[(0, 1), (1, 1), (1, 2)]));
        let a = q(&[(3, 7), (-1, 2), (5, 1)]);
        assert_eq!(a.integrate().differentiate(), a);
        assert_eq!(s(&[9]).differentiate(), Series::zero(0));
    }

    #[test]
    fn pointwise_family() {
        assert_eq!(s(&[1, 1, 1]).scale(&int(2)), s(&[1, 2, 4]));
        assert_eq!(s(&[1, 3, 6]).difference(), s(&[1, 2, 3]));
        assert_eq!(s(&[1, 2, 3]).partial_sum(), s(&[1, 3, 6]));
        assert_eq!(s(&[1, 2, 3]).add(&s(&[1, 1])), s(&[2, 3]));
    }

    #[test]
    fn convolution_examples() {
        assert_eq!(s(&[1, 1, 1]).convolve(&s(&[1, 1, 1])), s(&[1, 2, 3]));
        let a = q(&[(1, 3), (2, 5), (-7, 2)]);
        assert_eq!(a.convolve(&Series::one(2)), a);
        let half = q(&[(0, 1), (0, 1), (1, 2), (0, 1), (0, 1)]);
        assert_eq!(half.convolve(&half), q(&[(0, 1), (0, 1), (0, 1), (0, 1), (1, 4)]));
    }

    #[test]
    fn hadamard_examples() {
        assert_eq!(s(&[1, 2, 3]).hadamard(&q(&[(1, 1), (1, 2), (1, 3)])), s(&[1, 1, 1]));
        let a = q(&[(2, 9), (-1, 4)]);
        assert_eq!(a.hadamard(&Series::ones(5)), a);
        assert_eq!(s(&[0, 1, 0]).hadamard(&s(&[5, 5, 5])), s(&[0, 5, 0]));
    }

    #[test]
    fn block_series_values() {
        assert_eq!(
            poisson_block_series(1, 4),
            q(&[(0, 1), (0, 1), (1, 2), (1, 6), (1, 24)])
        );
        assert_eq!(*poisson_block_series(2, 4).coef(4).unwrap(), frac(1, 4));
        assert_eq!(*poisson_block_series(2, 6).coef(6).unwrap(), frac(5, 72));
        assert_eq!(poisson_block_series(0, 3), Series::one(3));
        assert!(poisson_block_series(3, 5).coef(5).unwrap().is_zero());
        assert_eq!(poisson_block_powers(3, 8)[3], poisson_block_series(3, 8));
    }

    #[test]
    fn coef_extraction() {
        assert_eq!(*s(&[1, 2, 3]).coef(1).unwrap(), int(2));
        assert_eq!(*poisson_block_series(1, 4).coef(2).unwrap(), frac(1, 2));
        assert_eq!(s(&[1, 2, 3]).coef(3), Err(Error::OutOfRange { index: 3, order: 2 }));
    }

    #[test]
    fn evaluation() {
        let a = s(&[1, 2, 3]);
        assert_eq!(a.eval(&frac(1, 2)), frac(11, 4));
        let z = a.eval_complex(Complex64::new(0.5, 0.0));
        assert!((z.re - 2.75).abs() < 1e-15 && z.im == 0.0);
    }
}
