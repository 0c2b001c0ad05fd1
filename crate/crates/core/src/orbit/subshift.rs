use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::certified::CertifiedValue;
use crate::entropy::EntropyFunction;
use crate::error::{Error, Result};
use crate::scalar::{dyadic_exponent, rat_int, Rational};
use crate::words::{BitWord, NameMultiset};

/// Reference subshifts over `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SubshiftSpec {
    /// Full shift with the Bernoulli measure giving symbol `1` probability `p`.
    FullShift { p: Rational },
    /// Words avoiding every forbidden factor (topological only).
    Sft { forbidden: Vec<BitWord> },
    /// Two-state Markov measure: `matrix[a][b] = P(next = b | current = a)`.
    Markov { matrix: [[Rational; 2]; 2], stationary: [Rational; 2] },
}

impl SubshiftSpec {
    pub fn bernoulli(p: Rational) -> Result<Self> {
        if p < Rational::zero() || p > Rational::one() {
            return Err(Error::Domain(format!("Bernoulli parameter {p} outside [0,1]")));
        }
        Ok(SubshiftSpec::FullShift { p })
    }

    pub fn golden_mean() -> Self {
        SubshiftSpec::Sft { forbidden: vec!["11".parse().unwrap()] }
    }

    pub fn markov(matrix: [[Rational; 2]; 2], stationary: [Rational; 2]) -> Result<Self> {
        let one = Rational::one();
        let bad = |m: String| Err(Error::Domain(m));
        if matrix.iter().flatten().chain(stationary.iter()).any(|v| v < &Rational::zero()) {
            return bad("negative Markov entry".into());
        }
        if matrix.iter().any(|row| &row[0] + &row[1] != one) {
            return bad("Markov rows must sum to 1".into());
        }
        if &stationary[0] + &stationary[1] != one {
            return bad("stationary vector must sum to 1".into());
        }
        for b in 0..2 {
            if &stationary[0] * &matrix[0][b] + &stationary[1] * &matrix[1][b] != stationary[b] {
                return bad("stationary vector is not fixed by the matrix".into());
            }
        }
        Ok(SubshiftSpec::Markov { matrix, stationary })
    }

    /// Allowed transitions and initial symbols of the word graph, if the
    /// language is first-order.
    fn first_order(&self) -> Option<([bool; 2], [[bool; 2]; 2])> {
        let nz = |r: &Rational| !r.is_zero();
        match self {
            SubshiftSpec::FullShift { p } => {
                let s = [nz(&(Rational::one() - p)), nz(p)];
                Some((s, [s, s]))
            }
            SubshiftSpec::Markov { matrix, stationary } => Some((
                [nz(&stationary[0]), nz(&stationary[1])],
                [[nz(&matrix[0][0]), nz(&matrix[0][1])], [nz(&matrix[1][0]), nz(&matrix[1][1])]],
            )),
            SubshiftSpec::Sft { .. } => None,
        }
    }

    /// Number of words of length `n` in the language.
    pub fn complexity(&self, n: usize) -> Result<BigUint> {
        if n == 0 {
            return Err(Error::Precondition("complexity needs n >= 1".into()));
        }
        if let Some((init, trans)) = self.first_order() {
            let mut v: [BigUint; 2] = [BigUint::from(init[0] as u8), BigUint::from(init[1] as u8)];
            for _ in 1..n {
                let mut w = [BigUint::zero(), BigUint::zero()];
                for a in 0..2 {
                    for b in 0..2 {
                        if trans[a][b] {
                            w[b] += &v[a];
                        }
                    }
                }
                v = w;
            }
            return Ok(&v[0] + &v[1]);
        }
        let SubshiftSpec::Sft { forbidden } = self else { unreachable!() };
        Ok(sft_count(forbidden, n))
    }

    /// Cylinder measures `(mu, multiplicity)` of all words of length `n`,
    /// grouped by measure value.
    pub fn cylinder_profile(&self, n: usize) -> Result<Vec<(Rational, BigUint)>> {
        if n == 0 {
            return Err(Error::Precondition("cylinders need n >= 1".into()));
        }
        match self {
            SubshiftSpec::FullShift { p } => {
                let q = Rational::one() - p;
                let mut out: BTreeMap<Rational, BigUint> = BTreeMap::new();
                let mut binom = BigUint::one();
                for ones in 0..=n {
                    let mu = pow(p, ones) * pow(&q, n - ones);
                    if !mu.is_zero() {
                        *out.entry(mu).or_insert_with(BigUint::zero) += &binom;
                    }
                    binom = binom * BigUint::from(n - ones) / BigUint::from(ones + 1);
                }
                Ok(out.into_iter().collect())
            }
            SubshiftSpec::Markov { matrix, stationary } => {
                // track the last symbol and the exact cylinder measure
                let mut cur: HashMap<(usize, Rational), BigUint> = HashMap::new();
                for (a, pi) in stationary.iter().enumerate() {
                    if !pi.is_zero() {
                        cur.insert((a, pi.clone()), BigUint::one());
                    }
                }
                for _ in 1..n {
                    let mut next: HashMap<(usize, Rational), BigUint> = HashMap::new();
                    for ((a, mu), c) in &cur {
                        for b in 0..2 {
                            let t = &matrix[*a][b];
                            if !t.is_zero() {
                                *next.entry((b, mu * t)).or_insert_with(BigUint::zero) += c;
                            }
                        }
                    }
                    cur = next;
                }
                let mut out: BTreeMap<Rational, BigUint> = BTreeMap::new();
                for ((_, mu), c) in cur {
                    *out.entry(mu).or_insert_with(BigUint::zero) += c;
                }
                Ok(out.into_iter().collect())
            }
            SubshiftSpec::Sft { .. } => Err(Error::Precondition("an SFT carries no measure here".into())),
        }
    }

    /// Every cylinder of length `n <= 24` with its exact measure.
    pub fn cylinder_measures(&self, n: usize) -> Result<NameMultiset> {
        if n == 0 || n > 24 {
            return Err(Error::Precondition(format!("explicit cylinders need 1 <= n <= 24, got {n}")));
        }
        let mut entries = BTreeMap::new();
        for v in 0..(1u64 << n) {
            let w = BitWord::from_u64(v, n);
            let mu = self.word_measure(&w)?;
            if !mu.is_zero() {
                entries.insert(w, CertifiedValue::from_rational(&mu));
            }
        }
        NameMultiset::new(n, entries, CertifiedValue::zero())
    }

    pub fn word_measure(&self, w: &BitWord) -> Result<Rational> {
        match self {
            SubshiftSpec::FullShift { p } => {
                let ones = w.count_ones();
                Ok(pow(p, ones) * pow(&(Rational::one() - p), w.len() - ones))
            }
            SubshiftSpec::Markov { matrix, stationary } => {
                let mut mu = stationary[w.get(0) as usize].clone();
                for i in 1..w.len() {
                    mu *= &matrix[w.get(i - 1) as usize][w.get(i) as usize];
                }
                Ok(mu)
            }
            SubshiftSpec::Sft { .. } => Err(Error::Precondition("an SFT carries no measure here".into())),
        }
    }
}

fn pow(x: &Rational, e: usize) -> Rational {
    num_traits::pow(x.clone(), e)
}

/// Words of length `n` avoiding `forbidden`, by dynamic programming over the
/// last `L - 1` symbols.
fn sft_count(forbidden: &[BitWord], n: usize) -> BigUint {
    let l = forbidden.iter().map(|w| w.len()).max().unwrap_or(1).max(1);
    let ctx = l - 1;
    let ok = |w: &BitWord| forbidden.iter().all(|f| f.len() > w.len() || (0..=w.len() - f.len()).all(|i| &w.window(i, f.len()) != f));
    // state: last min(len, ctx) symbols, as a word
    let mut cur: BTreeMap<BitWord, BigUint> = BTreeMap::new();
    cur.insert(BitWord::new(), BigUint::one());
    for _ in 0..n {
        let mut next: BTreeMap<BitWord, BigUint> = BTreeMap::new();
        for (s, c) in &cur {
            for b in [false, true] {
                let mut w = s.clone();
                w.push(b);
                if !ok(&w) {
                    continue;
                }
                let keep = w.len().min(ctx);
                let state = w.window(w.len() - keep, keep);
                *next.entry(state).or_insert_with(BigUint::zero) += c;
            }
        }
        cur = next;
    }
    cur.values().sum()
}

/// `log2` of a positive rational, accurate for values far outside `f64` range.
pub(crate) fn log2_rational(x: &Rational) -> f64 {
    log2_big(x.numer()) - log2_big(x.denom())
}

fn log2_big(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    (v >> shift).to_f64().unwrap().log2() + shift as f64
}

/// Certified `H(g, P_n)` for the cylinder partition of a measured subshift:
/// `sum c * g(mu) = sum (c mu) phi(mu)` over the cylinder profile.
pub fn subshift_entropy(g: &EntropyFunction, spec: &SubshiftSpec, n: usize) -> Result<CertifiedValue> {
    let mut acc = CertifiedValue::zero();
    for (mu, c) in spec.cylinder_profile(n)? {
        let weight = CertifiedValue::from_rational(&(&mu * Rational::from_integer(BigInt::from(c))));
        let phi = match dyadic_exponent(&mu) {
            Some(j) => g.phi_log_certified(j as f64),
            None => {
                let y = -log2_rational(&mu);
                let d = 1e-12 * y.abs().max(1.0);
                let lo = g.phi_log_certified((y - d).max(0.0));
                let hi = g.phi_log_certified(y + d);
                CertifiedValue::new(lo.lower, hi.upper)
            }
        };
        acc = &acc + &(&weight * &phi);
    }
    Ok(acc)
}

/// Total mass of a cylinder profile (always one; used as a consistency check).
pub fn profile_mass(profile: &[(Rational, BigUint)]) -> Rational {
    profile.iter().fold(rat_int(0), |acc, (mu, c)| acc + mu * Rational::from_integer(BigInt::from(c.clone())))
}
