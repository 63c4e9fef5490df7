//! Exact scalars.
//!
//! Values are arbitrary-precision fractions kept in lowest terms with a
//! positive denominator. The textual form is `"p/q"` or a bare integer.

use alloc::string::{String, ToString};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational number.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("malformed rational {0:?}; expected \"p/q\" or an integer")]
    Malformed(String),
}

/// `numer / denom` as an exact rational. Panics if `denom` is zero.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn parse(text: &str) -> Result<Rational, ParseRationalError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let valid = |s: &str, signed: bool| {
        let digits = if signed { s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s) } else { s };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return Err(ParseRationalError::Malformed(t.to_string()));
    }
    let n = BigInt::from_str(num).map_err(|_| ParseRationalError::Malformed(t.to_string()))?;
    let d = BigInt::from_str(den).map_err(|_| ParseRationalError::Malformed(t.to_string()))?;
    if d.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(t.to_string()));
    }
    Ok(Rational::new(n, d))
}

/// Canonical text form: `"p/q"`, or `"p"` for integers.
pub fn format(value: &Rational) -> String {
    value.to_string()
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| if value.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Midpoint of two rationals.
pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// `2^-exp` exactly.
pub fn pow2_inv(exp: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << exp as usize)
}
