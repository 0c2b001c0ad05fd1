//! Intervals that are guaranteed to contain a true value.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::{enclose_f64, Outward, Rational};

/// `[lower, upper]` enclosing an unknown true value.
///
/// Every operation rounds outward, so the image of the true inputs stays
/// inside the result. For exact scalars (`Rational`) rounding is a no-op.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certified<T> {
    pub lower: T,
    pub upper: T,
}

/// Floating-point certified value, the common currency of entropy bounds.
pub type CertifiedValue = Certified<f64>;
/// Exact rational enclosure.
pub type ExactInterval = Certified<Rational>;

impl<T: Outward> Certified<T> {
    /// Panics if `lower > upper`; callers construct bounds, so a reversed pair
    /// is a logic error rather than an input error.
    pub fn new(lower: T, upper: T) -> Self {
        assert!(lower <= upper, "certified interval with lower > upper: {lower:?} > {upper:?}");
        Self { lower, upper }
    }

    pub fn point(v: T) -> Self {
        Self { lower: v.clone(), upper: v }
    }

    pub fn zero() -> Self {
        Self::point(T::zero())
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, v: &T) -> bool {
        &self.lower <= v && v <= &self.upper
    }

    pub fn width(&self) -> T {
        (self.upper.clone() - self.lower.clone()).round_up()
    }

    pub fn hull(&self, other: &Self) -> Self {
        let lower = if self.lower <= other.lower { self.lower.clone() } else { other.lower.clone() };
        let upper = if self.upper >= other.upper { self.upper.clone() } else { other.upper.clone() };
        Self { lower, upper }
    }

    /// Whether the two enclosures can describe the same value.
    pub fn overlaps(&self, other: &Self) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    /// Multiplies by a scalar known to be nonnegative.
    pub fn scale(&self, k: T) -> Self {
        debug_assert!(k >= T::zero());
        Self { lower: (self.lower.clone() * k.clone()).round_down(), upper: (self.upper.clone() * k).round_up() }
    }

    /// Division by an interval that lies strictly above zero.
    pub fn div_positive(&self, d: &Self) -> Self {
        assert!(d.lower > T::zero(), "divisor interval must be positive");
        let cands = [
            self.lower.clone() / d.lower.clone(),
            self.lower.clone() / d.upper.clone(),
            self.upper.clone() / d.lower.clone(),
            self.upper.clone() / d.upper.clone(),
        ];
        let (lo, hi) = min_max(cands);
        Self { lower: lo.round_down(), upper: hi.round_up() }
    }

    /// Clamps both ends into `[lo, hi]`; used when the true value is known to
    /// live there (e.g. a probability).
    pub fn clamp(&self, lo: T, hi: T) -> Self {
        let c = |v: &T| {
            if *v < lo {
                lo.clone()
            } else if *v > hi {
                hi.clone()
            } else {
                v.clone()
            }
        };
        Self { lower: c(&self.lower), upper: c(&self.upper) }
    }
}

fn min_max<T: PartialOrd + Clone, const N: usize>(vals: [T; N]) -> (T, T) {
    let mut lo = vals[0].clone();
    let mut hi = vals[0].clone();
    for v in vals.iter().skip(1) {
        if *v < lo {
            lo = v.clone();
        }
        if *v > hi {
            hi = v.clone();
        }
    }
    (lo, hi)
}

impl<T: Outward> Add for &Certified<T> {
    type Output = Certified<T>;
    fn add(self, rhs: Self) -> Certified<T> {
        Certified { lower: T::add_down(self.lower.clone(), rhs.lower.clone()), upper: T::add_up(self.upper.clone(), rhs.upper.clone()) }
    }
}

impl<T: Outward> Add for Certified<T> {
    type Output = Certified<T>;
    fn add(self, rhs: Self) -> Certified<T> {
        &self + &rhs
    }
}

impl<T: Outward> Sub for &Certified<T> {
    type Output = Certified<T>;
    fn sub(self, rhs: Self) -> Certified<T> {
        Certified { lower: T::add_down(self.lower.clone(), -rhs.upper.clone()), upper: T::add_up(self.upper.clone(), -rhs.lower.clone()) }
    }
}

impl<T: Outward> Sub for Certified<T> {
    type Output = Certified<T>;
    fn sub(self, rhs: Self) -> Certified<T> {
        &self - &rhs
    }
}

impl<T: Outward> Neg for Certified<T> {
    type Output = Certified<T>;
    fn neg(self) -> Certified<T> {
        Certified { lower: -self.upper, upper: -self.lower }
    }
}

impl<T: Outward> Mul for &Certified<T> {
    type Output = Certified<T>;
    fn mul(self, rhs: Self) -> Certified<T> {
        let (lo, hi) = min_max([
            self.lower.clone() * rhs.lower.clone(),
            self.lower.clone() * rhs.upper.clone(),
            self.upper.clone() * rhs.lower.clone(),
            self.upper.clone() * rhs.upper.clone(),
        ]);
        Certified { lower: lo.round_down(), upper: hi.round_up() }
    }
}

impl<T: Outward> std::iter::Sum for Certified<T> {
    /// Left fold in iteration order; callers fix the order for reproducibility.
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| &acc + &x)
    }
}

impl CertifiedValue {
    /// Smallest `f64` interval enclosing an exact rational.
    pub fn from_rational(x: &Rational) -> Self {
        let (lower, upper) = enclose_f64(x);
        Self { lower, upper }
    }

    pub fn from_exact(x: &ExactInterval) -> Self {
        Self { lower: enclose_f64(&x.lower).0, upper: enclose_f64(&x.upper).1 }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// Widens by a relative slack to absorb rounding in transcendental
    /// library calls, which are not correctly rounded.
    pub fn widen_rel(&self, rel: f64) -> Self {
        let lo = self.lower - rel * self.lower.abs().max(f64::MIN_POSITIVE);
        let hi = self.upper + rel * self.upper.abs().max(f64::MIN_POSITIVE);
        Self { lower: lo.round_down(), upper: hi.round_up() }
    }
}

impl<T: fmt::Display> fmt::Display for Certified<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}
