//! Exact rationals and the handful of conversions the rest of the crate needs.

use alloc::format;
use alloc::string::{String, ToString};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Number of leading decimal digits used for the mantissa of [`log10_biguint`].
const LEADING_DIGITS: usize = 17;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn frac(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn from_biguint(value: BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, value))
}

/// Canonical `p/q` rendering; the denominator is always printed.
pub fn to_pq(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `p/q`, an integer, or a plain decimal such as `-0.05`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: {text:?}"));
    if text.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::InvalidArgument(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, fraction)) = text.split_once('.') {
        if fraction.is_empty() || !fraction.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let mut all = digits.to_string();
        all.push_str(fraction);
        let mut numer: BigInt = all.parse().map_err(|_| bad())?;
        if negative {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10u32), fraction.len());
        return Ok(Rational::new(numer, denom));
    }
    let value: BigInt = text.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(value))
}

/// `log10` of a positive big integer from its exact decimal digit count and
/// its leading digits.
pub fn log10_biguint(value: &BigUint) -> Result<f64> {
    if value.is_zero() {
        return Err(Error::UndefinedValue("log of zero".into()));
    }
    let digits = value.to_str_radix(10);
    let lead_len = digits.len().min(LEADING_DIGITS);
    let lead: f64 = digits[..lead_len]
        .parse()
        .map_err(|_| Error::UndefinedValue("unparsable leading digits".into()))?;
    Ok(libm::log10(lead) + (digits.len() - lead_len) as f64)
}

/// `log10 |value|`, never converting the rational to a float first.
pub fn log10_abs(value: &Rational) -> Result<f64> {
    if value.is_zero() {
        return Err(Error::UndefinedValue("log of zero".into()));
    }
    let numer = value.numer().magnitude();
    let denom = value.denom().magnitude();
    Ok(log10_biguint(numer)? - log10_biguint(denom)?)
}

/// Nearest `f64`, accurate to a couple of ulps even when numerator and
/// denominator overflow `f64` individually. Saturates to `±inf` or `0`.
pub fn to_f64(value: &Rational) -> f64 {
    if value.is_zero() {
        return 0.0;
    }
    let (numer, n_shift) = top_bits(value.numer().magnitude());
    let (denom, d_shift) = top_bits(value.denom().magnitude());
    let magnitude = libm::ldexp(numer / denom, n_shift - d_shift);
    if value.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

fn top_bits(value: &BigUint) -> (f64, i32) {
    let bits = value.bits();
    if bits <= 64 {
        return (value.iter_u64_digits().next().unwrap_or(0) as f64, 0);
    }
    let shift = bits - 64;
    let top = (value >> shift).iter_u64_digits().next().unwrap_or(0);
    (top as f64, shift as i32)
}

/// Exact `base^exp` for a rational base and natural exponent.
pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_accepted_forms() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-6/4").unwrap(), frac(-3, 2));
        assert_eq!(parse_rational("0.05").unwrap(), frac(1, 20));
        assert_eq!(parse_rational("-1.25").unwrap(), frac(-5, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn pq_always_prints_denominator() {
        assert_eq!(to_pq(&int(7)), "7/1");
        assert_eq!(to_pq(&frac(2, -4)), "-1/2");
    }

    #[test]
    fn log10_of_huge_values() {
        let huge = num_traits::pow(BigUint::from(10u32), 400) * BigUint::from(3u32);
        let got = log10_biguint(&huge).unwrap();
        assert!((got - (400.0 + libm::log10(3.0))).abs() < 1e-12);
        assert!((log10_abs(&frac(1, 2)).unwrap() + 0.301_029_995_663_981_2).abs() < 1e-14);
        assert!(log10_abs(&int(0)).is_err());
    }

    #[test]
    fn to_f64_handles_overflowing_parts() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = Rational::new(big.clone() * BigInt::from(3), big * BigInt::from(4));
        assert_eq!(to_f64(&r), 0.75);
        assert_eq!(to_f64(&frac(-1, 3)), -1.0 / 3.0);
    }
}
