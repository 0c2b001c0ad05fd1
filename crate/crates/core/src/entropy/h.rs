//! Increasing concave profiles `h` with `g(x) = x * h(-log2 x)`.

use num_bigint::BigInt;
use num_traits::{Float, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rat_int, Rational};

/// Profile functions used to build entropy functions and rate sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HFunction {
    /// Piecewise-linear, not regularly varying: `x` on `[0,1)`, then
    /// `2^-k x + 2^(k+1) - 2` on `[4^k, 4^(k+1))`.
    Ir,
    /// `log2(1 + x)`.
    Log,
    /// `m`-fold iterate of `log2(1 + x)`; `LogIter(0)` is the identity.
    LogIter(u32),
}

/// Index `k` of the linear piece of the piecewise profile containing `x >= 1`.
pub fn ir_piece<F: Float>(x: F) -> u32 {
    let four = F::from(4.0).unwrap();
    let mut k = 0u32;
    let mut bound = four;
    while x >= bound && bound.is_finite() {
        k += 1;
        bound = bound * four;
    }
    k
}

fn ir_piece_exact(x: &Rational) -> u32 {
    let mut k = 0u32;
    let mut bound = BigInt::from(4);
    while x >= &Rational::from_integer(bound.clone()) {
        k += 1;
        bound <<= 2usize;
    }
    k
}

fn log_step<F: Float>(x: F) -> F {
    x.ln_1p() / F::from(std::f64::consts::LN_2).unwrap()
}

impl HFunction {
    pub fn eval<F: Float>(&self, x: F) -> Result<F> {
        if !(x >= F::zero()) {
            return Err(Error::Domain(format!("h requires x >= 0, got {:?}", x.to_f64())));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked<F: Float>(&self, x: F) -> F {
        match *self {
            HFunction::Ir => {
                if x < F::one() {
                    return x;
                }
                let k = ir_piece(x);
                let two = F::from(2.0).unwrap();
                x * two.powi(-(k as i32)) + two.powi(k as i32 + 1) - two
            }
            HFunction::Log => log_step(x),
            HFunction::LogIter(m) => (0..m).fold(x, |acc, _| log_step(acc)),
        }
    }

    /// Exact value at a rational argument, when the profile is piecewise linear.
    pub fn eval_exact(&self, x: &Rational) -> Result<Option<Rational>> {
        if x.is_negative() {
            return Err(Error::Domain(format!("h requires x >= 0, got {x}")));
        }
        Ok(match *self {
            HFunction::Ir => {
                if x < &Rational::one() {
                    Some(x.clone())
                } else {
                    let k = ir_piece_exact(x);
                    let two_k = rat_int(BigInt::one() << k as usize);
                    Some(x / &two_k + &two_k * rat_int(2) - rat_int(2))
                }
            }
            HFunction::LogIter(0) => Some(x.clone()),
            _ if x.is_zero() => Some(Rational::zero()),
            _ => None,
        })
    }

    /// Right derivative `h'(x+)`.
    pub fn deriv_right<F: Float>(&self, x: F) -> F {
        let ln2 = F::from(std::f64::consts::LN_2).unwrap();
        match *self {
            HFunction::Ir => {
                if x < F::one() {
                    F::one()
                } else {
                    F::from(2.0).unwrap().powi(-(ir_piece(x) as i32))
                }
            }
            HFunction::Log => F::one() / ((F::one() + x) * ln2),
            HFunction::LogIter(m) => {
                let mut t = x;
                let mut d = F::one();
                for _ in 0..m {
                    d = d / ((F::one() + t) * ln2);
                    t = log_step(t);
                }
                d
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            HFunction::Ir => "hir".into(),
            HFunction::Log => "hlog".into(),
            HFunction::LogIter(m) => format!("hlogiter:m={m}"),
        }
    }
}

/// Unique `m` with `v` in `[2^(4^m), 2^(4^(m+1)))`; `None` below 2, where only
/// the linear piece applies.
pub fn h_piece_index(v: f64) -> Option<u32> {
    if !(v >= 2.0) {
        return None;
    }
    let mut m = 0u32;
    loop {
        let next_exp = 4f64.powi(m as i32 + 1);
        if next_exp > 1023.0 || v < 2f64.powf(next_exp) {
            return Some(m);
        }
        m += 1;
    }
}

/// Exact variant for integer arguments of any size.
pub fn h_piece_index_int(v: &BigInt) -> Option<u32> {
    if v < &BigInt::from(2) {
        return None;
    }
    // v >= 2^e  <=>  bits(v) > e
    let bits = v.bits();
    let mut m = 0u32;
    loop {
        let next_exp = 4u64.checked_pow(m + 1).unwrap_or(u64::MAX);
        if bits <= next_exp {
            return Some(m);
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn ir_values() {
        assert_eq!(HFunction::Ir.eval(16.0).unwrap(), 10.0);
        assert_eq!(HFunction::Ir.eval(4.0).unwrap(), 4.0);
        assert_eq!(HFunction::Ir.eval(256.0).unwrap(), 46.0);
        assert_eq!(HFunction::Ir.eval(0.5).unwrap(), 0.5);
        assert_eq!(HFunction::Ir.eval_exact(&rat(16, 1)).unwrap(), Some(rat(10, 1)));
        assert!(HFunction::Ir.eval(-1.0).is_err());
    }

    #[test]
    fn ir_continuity_exact() {
        for k in 0..=10u32 {
            let b = rat_int(BigInt::one() << (2 * k) as usize);
            // left piece k-1 (or identity for k = 0), right piece k
            let left = if k == 0 {
                b.clone()
            } else {
                let t = rat_int(BigInt::one() << (k - 1) as usize);
                &b / &t + &t * rat_int(2) - rat_int(2)
            };
            let right = HFunction::Ir.eval_exact(&b).unwrap().unwrap();
            assert_eq!(left, right, "breakpoint 4^{k}");
            let expected = rat_int(3 * (BigInt::one() << k as usize) - 2);
            assert_eq!(right, expected);
        }
    }

    #[test]
    fn piece_index_examples() {
        assert_eq!(h_piece_index(24.0), Some(1));
        assert_eq!(h_piece_index(2.0), Some(0));
        assert_eq!(h_piece_index(65536.0), Some(2));
        assert_eq!(h_piece_index(65535.0), Some(1));
        assert_eq!(h_piece_index(1.5), None);
        assert_eq!(h_piece_index_int(&BigInt::from(65536)), Some(2));
        assert_eq!(h_piece_index_int(&BigInt::from(24)), Some(1));
        assert_eq!(h_piece_index_int(&BigInt::from(1)), None);
    }

    #[test]
    fn log_iter_matches_composition() {
        let x = 37.5f64;
        let two = HFunction::LogIter(2).eval(x).unwrap();
        let direct = HFunction::Log.eval(HFunction::Log.eval(x).unwrap()).unwrap();
        assert!((two - direct).abs() < 1e-15);
        let d = HFunction::LogIter(2).deriv_right(x);
        let fd = (HFunction::LogIter(2).eval(x + 1e-6).unwrap() - HFunction::LogIter(2).eval(x - 1e-6).unwrap()) / 2e-6;
        assert!((d - fd).abs() < 1e-8);
    }

    #[test]
    fn nondecreasing_on_grid() {
        for h in [HFunction::Ir, HFunction::Log, HFunction::LogIter(3)] {
            assert_eq!(h.eval(0.0).unwrap(), 0.0);
            let mut prev = 0.0;
            for i in 1..5000 {
                let v = h.eval(i as f64 * 0.37).unwrap();
                assert!(v >= prev);
                prev = v;
            }
        }
    }
}
