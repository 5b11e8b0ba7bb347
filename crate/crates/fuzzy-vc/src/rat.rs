//! Exact rational scalars and their canonical text form.
//!
//! Every threshold comparison in this crate is exact, so rationals are
//! carried as [`num_rational::BigRational`] end to end and serialized as
//! `"numerator/denominator"` strings in lowest terms with a positive
//! denominator.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rat = num_rational::BigRational;

/// Builds a rational from small integers.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integral rational.
pub fn rat_int(num: i64) -> Rat {
    Rat::from_integer(BigInt::from(num))
}

/// Parses the canonical `"p/q"` form.
///
/// Requires an explicit positive denominator and lowest terms, so that
/// re-serialization reproduces the input bytes.
pub fn parse_rat(s: &str, path: &str) -> Result<Rat> {
    let err = |message: &str| Error::Parse {
        path: path.to_string(),
        message: message.to_string(),
    };
    let (num_s, den_s) = s
        .split_once('/')
        .ok_or_else(|| err("rational must be written as \"p/q\""))?;
    if num_s.is_empty()
        || den_s.is_empty()
        || num_s.trim() != num_s
        || den_s.trim() != den_s
        || den_s.starts_with('+')
        || num_s.starts_with('+')
    {
        return Err(err("malformed rational"));
    }
    let num: BigInt = num_s
        .parse()
        .map_err(|_| err("numerator is not an integer"))?;
    let den: BigInt = den_s
        .parse()
        .map_err(|_| err("denominator is not an integer"))?;
    if num_s == "-0" {
        return Err(err("negative zero numerator"));
    }
    if den <= BigInt::zero() {
        return Err(err("denominator must be positive"));
    }
    if num_integer::gcd(num.abs(), den.clone()) != BigInt::one() {
        return Err(err("rational not in lowest terms"));
    }
    Ok(Rat::new(num, den))
}

/// Canonical `"p/q"` rendering (lowest terms, positive denominator).
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Nearest-double rendering for Monte Carlo paths and report summaries.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of lossy conversions for huge terms.
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// True when `r` lies in the closed unit interval.
pub fn in_unit_interval(r: &Rat) -> bool {
    !r.is_negative() && *r <= Rat::one()
}
