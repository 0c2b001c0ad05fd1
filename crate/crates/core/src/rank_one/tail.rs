use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::RankOneSystem;
use crate::certified::ExactInterval;
use crate::error::{Error, Result};
use crate::scalar::{enclose_f64, from_f64_exact, Outward, Rational};

/// Upper bound on the Lebesgue measure of the space beyond `[0, x_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TailBound {
    /// `exact` is `x_N - x_n` over the known primes; `upper` adds the
    /// majorant for the unknown continuation.
    Bounded { exact: Rational, upper: Rational },
    /// No prime beyond stage `n` is known.
    Unbounded,
}

/// How measures are normalised into probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// Total measure certified to lie in the normaliser interval.
    Certified,
    /// No tail bound: probabilities are relative to `[0, x_M)`.
    StageRelative,
}

impl RankOneSystem {
    /// Bound on `mu(J \ [0, x_n))`.
    ///
    /// Known increments are summed exactly. Beyond the last known prime
    /// `p_N`, the continuation is assumed to grow at least like the known
    /// part, `p_(m+1) >= max(6 p_m^2 + 2, p_m^3 / C)` with
    /// `C = max p_(n-1)^3 / p_n`; under that assumption
    /// `x_(m+1) / x_m <= 1 + 1/(6p^2) + C q^2 / (3 p^5)`, and the product
    /// of these factors is bounded by an exponential of their sum.
    pub fn tail_bound(&self, n: usize) -> Result<TailBound> {
        let params = self.params();
        if n >= params.len() {
            return Err(Error::StageUnavailable(n));
        }
        let last = params.len() - 1;
        if n >= last || self.is_truncated() {
            return Ok(TailBound::Unbounded);
        }
        let exact = &params[last].x - &params[n].x;
        let c = self.primes().cube_ratio_sup().and_then(|c| c.to_f64()).unwrap_or(1.0).round_up();
        let s = continuation_rate_sum(params[last].p as f64, c);
        let x_n_hi = enclose_f64(&params[last].x).1;
        let beyond = (x_n_hi * s.exp_m1() * (1.0 + 1e-12)).round_up();
        let upper = &exact + from_f64_exact(beyond).expect("finite majorant");
        Ok(TailBound::Bounded { exact, upper })
    }

    /// Interval containing the total measure, for normalising stage-`m` masses.
    pub fn normalizer(&self, m: usize) -> Result<(ExactInterval, Normalization)> {
        let x = self.stage(m)?.x.clone();
        Ok(match self.tail_bound(m)? {
            TailBound::Bounded { upper, .. } => (ExactInterval::new(x.clone(), &x + upper), Normalization::Certified),
            TailBound::Unbounded => (ExactInterval::point(x), Normalization::StageRelative),
        })
    }
}

/// Sum of the per-stage growth bounds from prime `p` onward.
fn continuation_rate_sum(mut p: f64, c: f64) -> f64 {
    let mut sum = 0.0;
    for _ in 0..64 {
        let q = 6.0 * p * p + 1.0;
        let next = (p * p * p / c).max(q + 1.0);
        let rho = if p * p * p / (c * q) >= 2.0 {
            1.0 / (6.0 * p * p) + c * q * q / (3.0 * p.powi(5))
        } else {
            // only k >= 1 is available
            q / (6.0 * p * p)
        };
        sum += rho * (1.0 + 1e-12);
        if rho < sum * 1e-20 || !next.is_finite() {
            break;
        }
        p = next;
    }
    sum.round_up()
}
