//! Arithmetic modes.
//!
//! Everything numeric is generic over [`Scalar`], implemented for exact
//! rationals ([`Rational`]) and for `f64`. Exact code paths never round; float
//! paths compare with an explicit tolerance.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// `true` for exact arithmetic.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    /// Nearest integer, halves rounded toward +infinity.
    fn round_i64(&self) -> i64;

    /// Equality up to an absolute tolerance. Exact scalars ignore `tol`.
    fn close_to(&self, other: &Self, tol: f64) -> bool;

    /// The positive `n`-th root when it is representable in this mode.
    fn nth_root(&self, n: u32) -> Option<Self>;

    /// Representation of a float that is already an approximation; rationals
    /// take the shortest decimal that round-trips.
    fn approximate(x: f64) -> Self;

    fn half() -> Self {
        Self::one() / Self::from_i64(2)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn round_i64(&self) -> i64 {
        let shifted = self + Rational::new(BigInt::one(), BigInt::from(2));
        shifted
            .floor()
            .to_integer()
            .to_i64()
            .expect("rounded value exceeds i64")
    }

    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        if self.is_negative() || n == 0 {
            return None;
        }
        let num = exact_root(self.numer(), n)?;
        let den = exact_root(self.denom(), n)?;
        Some(Rational::new(num, den))
    }

    fn approximate(x: f64) -> Self {
        rational_from_decimal(x).expect("finite float")
    }
}

fn exact_root(v: &BigInt, n: u32) -> Option<BigInt> {
    let r = v.nth_root(n);
    (num_traits::pow(r.clone(), n as usize) == *v).then_some(r)
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        Scalar::to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn round_i64(&self) -> i64 {
        (self + 0.5).floor() as i64
    }

    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        (*self >= 0.0 && n > 0).then(|| self.powf(1.0 / n as f64))
    }

    fn approximate(x: f64) -> Self {
        x
    }
}

/// Parses `"p/q"`, an integer, or a decimal literal such as `"7.3"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| Error::Parse(s.to_string()))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| Error::Parse(s.to_string()))?;
        if q.is_zero() {
            return Err(Error::Parse(s.to_string()));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| Error::Parse(s.to_string()))?;
            if e.abs() > 4096 {
                return Err(Error::Parse(s.to_string()));
            }
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).map_err(|_| Error::Parse(s.to_string()))?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Exact rational value of the shortest decimal representation of `x`.
///
/// `7.3` becomes `73/10`, not the binary expansion of the nearest double.
pub fn rational_from_decimal(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Parse(x.to_string()));
    }
    parse_rational(&format!("{x}"))
}

/// The value as an `i64` when it is an integer in range.
pub fn rational_as_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        num_traits::ToPrimitive::to_i64(r.numer())
    } else {
        None
    }
}

/// Shorthand used throughout the tests and examples.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}
