use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rat_int, Rational};

/// Validated prime sequence `p_0 < p_1 < ...` with `(6 p_n^2 + 1) / p_(n+1) < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSeq {
    primes: Vec<u64>,
}

pub fn is_prime(n: u64) -> bool {
    primal_check::miller_rabin(n)
}

/// `6 p^2 + 1`, the height of the three-column tower built from stage `p`.
pub fn q_of(p: u64) -> Option<u64> {
    p.checked_mul(p)?.checked_mul(6)?.checked_add(1)
}

impl PrimeSeq {
    /// Checks primality and the per-pair growth ratio. Convergence of
    /// `sum p_n^2 / p_(n+1)` cannot be decided from finitely many terms.
    pub fn new(primes: Vec<u64>) -> Result<Self> {
        if primes.is_empty() {
            return Err(Error::Precondition("prime sequence is empty".into()));
        }
        for (i, &p) in primes.iter().enumerate() {
            if !is_prime(p) {
                return Err(Error::InvalidPrime { index: i, reason: format!("{p} is not prime") });
            }
        }
        for (i, w) in primes.windows(2).enumerate() {
            let q = q_of(w[0]).ok_or_else(|| Error::InvalidPrime { index: i, reason: "6p^2+1 overflows".into() })?;
            if q >= w[1] {
                return Err(Error::InvalidPrime { index: i + 1, reason: format!("(6*{}^2+1)/{} = {}/{} is not < 1", w[0], w[1], q, w[1]) });
            }
        }
        Ok(Self { primes })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<u64> {
        self.primes.get(n).copied()
    }

    /// `(6 p_(n-1)^2 + 1) / p_n` for each consecutive pair, exactly.
    pub fn ratios(&self) -> Vec<Rational> {
        self.primes.windows(2).map(|w| rat_int(6 * (w[0] as u128) * (w[0] as u128) + 1) / rat_int(w[1])).collect()
    }

    /// `max p_(n-1)^3 / p_n` over the known pairs.
    pub fn cube_ratio_sup(&self) -> Option<Rational> {
        self.primes.windows(2).map(|w| rat_int((w[0] as u128).pow(3)) / rat_int(w[1])).max()
    }

    /// `sum p_(n-1)^2 / p_n` over the known pairs.
    pub fn square_ratio_sum(&self) -> Rational {
        self.primes.windows(2).map(|w| rat_int((w[0] as u128).pow(2)) / rat_int(w[1])).fold(rat_int(0), |a, b| a + b)
    }
}

/// Smallest prime `>= n`.
pub fn next_prime(mut n: u64) -> Option<u64> {
    if n <= 2 {
        return Some(2);
    }
    if n.is_multiple_of(2) {
        n += 1;
    }
    while !is_prime(n) {
        n = n.checked_add(2)?;
    }
    Some(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn examples() {
        let s = PrimeSeq::new(vec![2, 29]).unwrap();
        assert_eq!(s.ratios(), vec![rat(25, 29)]);
        assert!(matches!(PrimeSeq::new(vec![2, 23]), Err(Error::InvalidPrime { index: 1, .. })));
        assert!(matches!(PrimeSeq::new(vec![4, 29]), Err(Error::InvalidPrime { index: 0, .. })));
        assert!(PrimeSeq::new(vec![2, 29, 5051]).is_ok());
        assert!(PrimeSeq::new(vec![]).is_err());
    }

    #[test]
    fn primality_against_sieve() {
        let n = 20_000usize;
        let mut sieve = vec![true; n];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..n {
            if sieve[i] {
                for j in (i * i..n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime(i as u64), p, "{i}");
        }
        assert_eq!(next_prime(5048), Some(5051));
        assert!(is_prime((1u64 << 61) - 1));
    }
}
