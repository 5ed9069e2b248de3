//! Exact rational scalars.
//!
//! Every weight, probability, and utility in this crate is a
//! [`Rational`] — an arbitrary-precision reduced fraction with a
//! positive denominator. There is no floating point anywhere; all
//! decisions downstream (cone membership, axiom verdicts, calibration)
//! are exact, so two runs on the same input are bit-identical.
//!
//! Across the CLI boundary rationals travel as strings: `"3/5"`,
//! `"-1/2"`, or plain integers like `"2"`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// `p/q` as a reduced rational. Panics if `q == 0`; test/construction helper.
pub fn rat(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a rational.
pub fn rint(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {text:?}: {reason}")]
pub struct ParseRationalError {
    pub text: String,
    pub reason: String,
}

/// Parses `"p/q"` or `"n"` (optional leading `-`).
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason: &str| ParseRationalError {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let s = text.trim();
    if s.is_empty() {
        return Err(err("empty"));
    }
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num: BigInt = num_s
        .parse()
        .map_err(|_| err("numerator is not an integer"))?;
    let den: BigInt = match den_s {
        Some(d) => d.parse().map_err(|_| err("denominator is not an integer"))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

/// Formats as `"n"` when integral, `"p/q"` otherwise (always reduced).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True iff `r > 0`.
pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

/// True iff `r == 0`.
pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Serde adapter: rationals as `"p/q"` strings.
pub mod serde_ratio {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        format_rational(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}
