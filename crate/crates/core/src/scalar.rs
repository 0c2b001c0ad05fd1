//! Scalar plumbing shared by the exact and floating-point code paths.
//!
//! Geometry is generic over [`Scalar`] (any ordered signed field from
//! `num-traits`); certified arithmetic additionally needs [`Outward`], which
//! knows how to widen a computed bound so it still encloses the true value.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical form (gcd 1, positive denominator).
pub type Rational = BigRational;

/// Ordered field usable as an interval endpoint.
pub trait Scalar: Clone + PartialOrd + Num + Signed + Debug {}

impl<T: Clone + PartialOrd + Num + Signed + Debug> Scalar for T {}

/// Directed rounding of a bound that came out of a rounded operation.
pub trait Outward: Scalar {
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;
    fn round_down(self) -> Self;
    fn round_up(self) -> Self;
    /// Lower bound on `a + b`.
    fn add_down(a: Self, b: Self) -> Self {
        (a + b).round_down()
    }
    /// Upper bound on `a + b`.
    fn add_up(a: Self, b: Self) -> Self {
        (a + b).round_up()
    }
}

/// Rounding error of `a + b` (Knuth's two-sum); zero iff the sum is exact.
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

impl Outward for f64 {
    const EXACT: bool = false;
    fn round_down(self) -> Self {
        if self.is_nan() {
            f64::NEG_INFINITY
        } else {
            self.next_down()
        }
    }
    fn round_up(self) -> Self {
        if self.is_nan() {
            f64::INFINITY
        } else {
            self.next_up()
        }
    }
    fn add_down(a: Self, b: Self) -> Self {
        let s = a + b;
        if s.is_finite() && two_sum_err(a, b, s) >= 0.0 {
            s
        } else {
            s.round_down()
        }
    }
    fn add_up(a: Self, b: Self) -> Self {
        let s = a + b;
        if s.is_finite() && two_sum_err(a, b, s) <= 0.0 {
            s
        } else {
            s.round_up()
        }
    }
}

impl Outward for f32 {
    const EXACT: bool = false;
    fn round_down(self) -> Self {
        if self.is_nan() {
            f32::NEG_INFINITY
        } else {
            self.next_down()
        }
    }
    fn round_up(self) -> Self {
        if self.is_nan() {
            f32::INFINITY
        } else {
            self.next_up()
        }
    }
}

impl Outward for Rational {
    const EXACT: bool = true;
    fn round_down(self) -> Self {
        self
    }
    fn round_up(self) -> Self {
        self
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int<T: Into<BigInt>>(n: T) -> Rational {
    Rational::from_integer(n.into())
}

/// `2^-j` as an exact rational.
pub fn dyadic(j: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << j as usize)
}

/// If `x = 2^-j` for some `j >= 0`, returns `j`.
pub fn dyadic_exponent(x: &Rational) -> Option<u32> {
    if !x.numer().is_one() {
        return None;
    }
    let d = x.denom();
    let bits = d.bits();
    if bits == 0 {
        return None;
    }
    let j = bits - 1;
    if d == &(BigInt::one() << j as usize) {
        u32::try_from(j).ok()
    } else {
        None
    }
}

/// Interval `[lo, hi]` of `f64` values guaranteed to contain `x`.
pub fn enclose_f64(x: &Rational) -> (f64, f64) {
    let v = to_f64(x);
    if let Some(exact) = Rational::from_float(v) {
        if &exact == x {
            return (v, v);
        }
        if &exact < x {
            return (v, v.next_up());
        }
        return (v.next_down(), v);
    }
    (f64::NEG_INFINITY, f64::INFINITY)
}

/// Nearest-ish `f64`, robust for huge numerators/denominators.
pub fn to_f64(x: &Rational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() && (v != 0.0 || x.is_zero()) {
            return v;
        }
    }
    // Fall back to scaling by powers of two.
    let n = x.numer();
    let d = x.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let (n2, d2) = if shift > 0 { (n.clone(), d << (shift as usize)) } else { (n << ((-shift) as usize), d.clone()) };
    let scaled = Rational::new(n2, d2).to_f64().unwrap_or(f64::NAN);
    scaled * 2f64.powi(shift as i32)
}

/// Smallest rational `>= v` among exact binary expansions (the value itself).
pub fn from_f64_exact(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Ok(i) = BigInt::from_str(s) {
        return Ok(Rational::from_integer(i));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').ok_or_else(err)?;
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) || (int_part.is_empty() && frac_part.is_empty()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::new(BigInt::from_str(&digits).map_err(|_| err())?, num_traits::pow(BigInt::from(10), frac_part.len()));
    let ten = Rational::from_integer(BigInt::from(10));
    if exp >= 0 {
        value *= num_traits::pow(ten, exp as usize);
    } else {
        value /= num_traits::pow(ten, (-exp) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

/// Fifteen significant digits, scientific notation, stable across platforms.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.14e}")
    }
}

pub fn floor_to_bigint(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

pub fn is_zero_or_positive(x: &Rational) -> bool {
    !x.is_negative()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}
