//! Staged cutting-and-stacking construction driven by a prime sequence.
//!
//! Stage `n` is a single tower of `2 p_n^2` levels of common length `l_n`
//! filling `[0, x_n)`. Levels are never stored: the position of level `j` is
//! recovered by undoing the three cuts of the step that produced it.

mod aligned;
mod primes;
mod tail;

use serde::{Deserialize, Serialize};

pub use aligned::AlignedSet;
pub use primes::{is_prime, next_prime, q_of, PrimeSeq};
pub use tail::{Normalization, TailBound};

use crate::error::{Error, Result};
use crate::geometry::{IntervalSet, PiecewiseTranslation};
use crate::scalar::{rat_int, Rational};
use crate::words::{BitWord, SubstitutionStep, SubstitutionWord};

/// Parameters of one stage. For `n = 0`, `y = x` and `k = j = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub n: usize,
    pub p: u64,
    pub height: u128,
    pub x: Rational,
    pub y: Rational,
    pub k: u64,
    pub j: u64,
    pub level_len: Rational,
}

impl Stage {
    /// `6 p^2 + 1` for this stage's prime.
    pub fn q(&self) -> u128 {
        6 * (self.p as u128) * (self.p as u128) + 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankOneSystem {
    primes: PrimeSeq,
    /// Parameters for every prime whose stage height fits in `u128`.
    params: Vec<Stage>,
    built: usize,
}

impl RankOneSystem {
    /// Builds stages `0..stages`. If a stage height overflows, the system is
    /// truncated before it; see [`is_truncated`](Self::is_truncated).
    pub fn build(primes: PrimeSeq, stages: usize) -> Result<Self> {
        if stages == 0 || stages > primes.len() {
            return Err(Error::Precondition(format!("can build 1..={} stages, asked for {stages}", primes.len())));
        }
        let ps = primes.primes();
        let p0 = ps[0] as u128;
        let h0 = 2 * p0 * p0;
        let mut params = vec![Stage { n: 0, p: ps[0], height: h0, x: rat_int(h0), y: rat_int(h0), k: 0, j: 0, level_len: rat_int(1) }];
        for (n, &p) in ps.iter().enumerate().skip(1) {
            let prev = &params[n - 1];
            let q = prev.q();
            let p128 = p as u128;
            let Some(height) = p128.checked_mul(p128).and_then(|v| v.checked_mul(2)) else { break };
            let k = (p128 / q) as u64;
            let j = (p128 % q) as u64;
            let third = &prev.level_len / rat_int(3);
            let y = &prev.x + &third;
            let x = &y + &third * rat_int(j) / rat_int(k);
            let level_len = &prev.level_len / (rat_int(6) * rat_int(k) * rat_int(p));
            params.push(Stage { n, p, height, x, y, k, j, level_len });
        }
        let built = stages.min(params.len());
        Ok(Self { primes, params, built })
    }

    pub fn primes(&self) -> &PrimeSeq {
        &self.primes
    }

    /// Built stages, `0..len`.
    pub fn stages(&self) -> &[Stage] {
        &self.params[..self.built]
    }

    pub fn num_stages(&self) -> usize {
        self.built
    }

    pub fn is_truncated(&self) -> bool {
        self.params.len() < self.primes.len()
    }

    pub fn stage(&self, n: usize) -> Result<&Stage> {
        self.stages().get(n).ok_or(Error::StageUnavailable(n))
    }

    /// Parameters of a stage whose prime is known, built or not.
    pub(crate) fn params(&self) -> &[Stage] {
        &self.params
    }

    /// Left endpoint of level `j` of stage `n`.
    pub fn level_start(&self, n: usize, j: u128) -> Result<Rational> {
        let st = self.stage(n)?;
        if j >= st.height {
            return Err(Error::Precondition(format!("stage {n} has {} levels, asked for {j}", st.height)));
        }
        Ok(self.level_start_unchecked(n, j))
    }

    fn level_start_unchecked(&self, n: usize, j: u128) -> Rational {
        if n == 0 {
            return rat_int(j);
        }
        let st = &self.params[n];
        let prev = &self.params[n - 1];
        let p = st.p as u128;
        let (k, q, h) = (st.k as u128, prev.q(), prev.height);
        let col_w = &prev.level_len / rat_int(3);
        let w = &col_w / rat_int(k);
        let half = j / (p * p);
        let r = j % (p * p);
        let (s, t) = (r / p, r % p);
        let base = if t >= k * q {
            // spacer pieces of [y_n, x_n), stacked left to right
            &st.y + &w * rat_int(t - k * q)
        } else {
            let (d, u) = (t / q, t % q);
            let column = |c: u128, i: u128| self.level_start_unchecked(n - 1, i) + &col_w * rat_int(c);
            let b = if u < h {
                column(0, u)
            } else if u < 2 * h {
                column(1, u - h)
            } else if u == 2 * h {
                prev.x.clone()
            } else {
                column(2, u - 2 * h - 1)
            };
            b + &w * rat_int(d)
        };
        base + &w * rat_int(s) / rat_int(p) + &w * rat_int(half) / rat_int(2 * p)
    }

    pub fn level_interval(&self, n: usize, j: u128) -> Result<(Rational, Rational)> {
        let a = self.level_start(n, j)?;
        let b = &a + &self.stage(n)?.level_len;
        Ok((a, b))
    }

    /// Map sending level `j` onto level `j + 1`; undefined on the top level.
    /// Only available when the number of levels is at most `max_pieces`.
    pub fn stage_map(&self, n: usize, max_pieces: u128) -> Result<PiecewiseTranslation<Rational>> {
        let st = self.stage(n)?;
        if st.height > max_pieces {
            return Err(Error::Budget(format!("stage {n} map has {} pieces, budget {max_pieces}", st.height)));
        }
        let starts: Vec<Rational> = (0..st.height).map(|j| self.level_start_unchecked(n, j)).collect();
        let pieces = starts.windows(2).map(|w| (w[0].clone(), &w[0] + &st.level_len, &w[1] - &w[0])).collect();
        PiecewiseTranslation::new(pieces)
    }

    /// Base word of stage `n` with respect to a set aligned to an earlier stage.
    pub fn base_word(&self, n: usize, e: &AlignedSet, budget_bits: u64) -> Result<SubstitutionWord> {
        self.stage(n)?;
        let m = e.stage();
        if m > n {
            return Err(Error::NotAligned(format!("set aligned to stage {m} cannot be read at stage {n}")));
        }
        let hm = self.stage(m)?.height;
        if hm > budget_bits as u128 {
            return Err(Error::Budget(format!("stage {m} has {hm} levels")));
        }
        let mut base = BitWord::zeros(hm as usize);
        for &i in e.levels() {
            if i >= hm {
                return Err(Error::NotAligned(format!("level {i} does not exist at stage {m}")));
            }
            base.set(i as usize, true);
        }
        self.lift_word(base, m, n)
    }

    /// Indicator word of the stage-`m` tower `[0, x_m)` read at stage `n`.
    pub fn tower_word(&self, m: usize, n: usize, budget_bits: u64) -> Result<SubstitutionWord> {
        self.stage(n)?;
        if m > n {
            return Err(Error::NotAligned(format!("tower of stage {m} cannot be read at stage {n}")));
        }
        let hm = self.stage(m)?.height;
        if hm > budget_bits as u128 {
            return Err(Error::Budget(format!("stage {m} has {hm} levels")));
        }
        let mut base = BitWord::zeros(hm as usize);
        base.bits_mut().fill(true);
        self.lift_word(base, m, n)
    }

    fn lift_word(&self, base: BitWord, m: usize, n: usize) -> Result<SubstitutionWord> {
        let steps = self.params[m + 1..=n].iter().map(|s| SubstitutionStep { p: s.p, k: s.k, j: s.j }).collect();
        SubstitutionWord::new(base, steps)
    }

    /// Union of the levels of an aligned set, as intervals.
    pub fn aligned_intervals(&self, e: &AlignedSet) -> Result<IntervalSet<Rational>> {
        let m = e.stage();
        let raw = e.levels().iter().map(|&i| self.level_interval(m, i)).collect::<Result<Vec<_>>>()?;
        IntervalSet::canonicalize(raw)
    }
}
