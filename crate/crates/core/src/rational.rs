//! Exact rational arithmetic helpers used throughout the crate.
//!
//! Every density, threshold and certificate value is a `BigRational`; no
//! floating point ever decides a verdict.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

/// Crate-wide exact rational type.
pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `2^-e` as an exact rational.
pub fn pow2_neg(e: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << e)
}

pub fn big_pow(base: u64, exp: u32) -> BigInt {
    BigInt::from(base).pow(exp)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Renders a reduced fraction as `p` or `p/q`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `p/q` or a decimal literal such as `-0.30721` exactly.
pub fn parse_rat(text: &str) -> Result<Rat, RatParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(RatParseError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| RatParseError::Invalid(text.to_string()))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| RatParseError::Invalid(text.to_string()))?;
        if d.is_zero() {
            return Err(RatParseError::ZeroDenominator(text.to_string()));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part == "-" || int_part.is_empty() {
            "0".to_string()
        } else {
            int_part.trim_start_matches(['+', '-']).to_string()
        };
        if !int_digits.chars().all(|c| c.is_ascii_digit())
            || frac_part.is_empty()
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(RatParseError::Invalid(text.to_string()));
        }
        let digits = format!("{int_digits}{frac_part}");
        let n: BigInt = digits
            .parse()
            .map_err(|_| RatParseError::Invalid(text.to_string()))?;
        let d = BigInt::from(10u32).pow(frac_part.len() as u32);
        let r = Rat::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| RatParseError::Invalid(text.to_string()))?;
    Ok(Rat::from_integer(n))
}

pub fn is_strictly_positive(r: &Rat) -> bool {
    r.is_positive()
}
