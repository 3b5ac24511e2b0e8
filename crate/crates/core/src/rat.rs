//! Exact rational scalars.
//!
//! Every length, offset, value and slope in the crate is a `Rat`, an
//! arbitrary-precision rational. The canonical text form is `"p/q"` with the
//! sign on the numerator and `q >= 1`; plain integers are accepted on input.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// `n/d` as a reduced rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// The integer value, if the rational is an integer that fits in `i64`.
pub fn to_i64(r: &Rat) -> Option<i64> {
    if !is_integer(r) {
        return None;
    }
    let n = r.numer();
    i64::try_from(n.clone()).ok()
}

/// Canonical `"p/q"` form, denominator always printed: `fmt_rat(3) == "3/1"`.
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `"p/q"` or `"p"`; whitespace is not tolerated.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::BadRational(s.to_string());
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num_str.parse().map_err(|_| bad())?;
    let den: BigInt = den_str.parse().map_err(|_| bad())?;
    if den <= BigInt::zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn denominator_lcm(rs: &[&Rat]) -> BigInt {
    let mut acc = BigInt::one();
    for r in rs {
        acc = num_integer::lcm(acc, r.denom().clone());
    }
    acc
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}
