use serde::{Deserialize, Serialize};

use super::{factor_multiset, factor_multiset_periodic, BitWord, FactorCounts};
use crate::error::{Error, Result};

/// One substitution step `W' = ((W W 0 W)^k 0^j)^(2p)` with `p = k (3|W| + 1) + j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionStep {
    pub p: u64,
    pub k: u64,
    pub j: u64,
}

/// Staged base word: `words[0]` is given explicitly, later stages are kept as
/// plans and only expanded on request.
#[derive(Clone, Debug, PartialEq)]
pub struct SubstitutionWord {
    base: BitWord,
    steps: Vec<SubstitutionStep>,
    lens: Vec<u64>,
}

impl SubstitutionWord {
    pub fn new(base: BitWord, steps: Vec<SubstitutionStep>) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::Precondition("substitution base word is empty".into()));
        }
        let mut lens = vec![base.len() as u64];
        for s in &steps {
            let h = *lens.last().unwrap();
            let q = h.checked_mul(3).and_then(|v| v.checked_add(1)).ok_or_else(|| Error::Budget("word length overflows u64".into()))?;
            if s.k == 0 || s.k.checked_mul(q).and_then(|v| v.checked_add(s.j)) != Some(s.p) {
                return Err(Error::Precondition(format!("step {s:?} does not satisfy p = k(3h+1) + j with h = {h}")));
            }
            let len = s.p.checked_mul(2 * s.p).ok_or_else(|| Error::Budget("word length overflows u64".into()))?;
            lens.push(len);
        }
        Ok(Self { base, steps, lens })
    }

    /// Number of substitution steps available above the base.
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn len(&self, stage: usize) -> u64 {
        self.lens[stage]
    }

    pub fn step(&self, stage: usize) -> SubstitutionStep {
        self.steps[stage - 1]
    }

    pub fn base(&self) -> &BitWord {
        &self.base
    }

    /// Symbol `i` of the stage word, by index arithmetic.
    pub fn symbol_at(&self, stage: usize, mut i: u64) -> bool {
        let mut n = stage;
        loop {
            if n == 0 {
                return self.base.get(i as usize);
            }
            let s = self.steps[n - 1];
            let h = self.lens[n - 1];
            let q = 3 * h + 1;
            let t = i % s.p;
            if t >= s.k * q {
                return false;
            }
            let u = t % q;
            i = if u < h {
                u
            } else if u < 2 * h {
                u - h
            } else if u == 2 * h {
                return false;
            } else {
                u - 2 * h - 1
            };
            n -= 1;
        }
    }

    /// First `len` symbols of a stage word.
    pub fn prefix(&self, stage: usize, len: u64, budget_bits: u64) -> Result<BitWord> {
        let len = len.min(self.lens[stage]);
        if len > budget_bits {
            return Err(Error::Budget(format!("prefix of {len} symbols exceeds the budget of {budget_bits}")));
        }
        if stage == 0 {
            return Ok(self.base.window(0, len as usize));
        }
        // expand one block of period p from the previous stage, then repeat it
        let s = self.steps[stage - 1];
        let block_len = s.p.min(len);
        let prev_need = self.lens[stage - 1].min(block_len);
        let prev = self.prefix(stage - 1, prev_need, budget_bits)?;
        let mut block = BitWord::new();
        let mut u = BitWord::new();
        if prev.len() as u64 == self.lens[stage - 1] {
            u.extend_from(&prev);
            u.extend_from(&prev);
            u.push(false);
            u.extend_from(&prev);
            while (block.len() as u64) < block_len {
                block.extend_from(&u);
                if block.len() as u64 >= s.k * u.len() as u64 {
                    break;
                }
            }
        } else {
            block = prev;
        }
        if (block.len() as u64) < block_len {
            block.extend_from(&BitWord::zeros((block_len - block.len() as u64) as usize));
        }
        let block = block.window(0, block_len as usize);
        let mut out = BitWord::new();
        while (out.len() as u64) < len {
            out.extend_from(&block);
        }
        Ok(out.window(0, len as usize))
    }

    /// The full stage word, if it fits in the budget.
    pub fn materialize(&self, stage: usize, budget_bits: u64) -> Result<BitWord> {
        self.prefix(stage, self.lens[stage], budget_bits)
    }

    /// Length-`k` factor counts of a stage word without expanding it, using
    /// that stage words above the base are periodic with period `p`.
    pub fn factor_counts(&self, stage: usize, k: usize, budget_bits: u64) -> Result<FactorCounts> {
        if stage == 0 {
            return factor_multiset(&self.base, k);
        }
        let p = self.steps[stage - 1].p;
        let len = self.lens[stage];
        let need = len.min(p + k as u64 - 1);
        let prefix = self.prefix(stage, need, budget_bits)?;
        factor_multiset_periodic(&prefix, len, p, k)
    }
}
