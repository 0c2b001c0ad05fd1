use std::collections::{BTreeMap, HashMap};

use bitvec::prelude::*;
use rayon::prelude::*;

use super::BitWord;
use crate::error::{Error, Result};

pub type FactorCounts = BTreeMap<BitWord, u64>;

/// Windows per parallel chunk.
const CHUNK: usize = 1 << 16;

/// Occurrence counts of all length-`k` factors of `w`, over all
/// `|w| - k + 1` windows. Chunks are counted in parallel and merged into an
/// ordered map, so the result does not depend on scheduling.
pub fn factor_multiset(w: &BitWord, k: usize) -> Result<FactorCounts> {
    if k == 0 || k > w.len() {
        return Err(Error::Precondition(format!("factor length {k} must be in 1..={}", w.len())));
    }
    let windows = w.len() - k + 1;
    let starts: Vec<usize> = (0..windows).step_by(CHUNK).collect();
    let parts: Vec<FactorCounts> = starts.par_iter().map(|&s| count_range(w.bits(), k, s, (s + CHUNK).min(windows))).collect();
    let mut out = FactorCounts::new();
    for part in parts {
        for (f, c) in part {
            *out.entry(f).or_insert(0) += c;
        }
    }
    Ok(out)
}

/// Counts windows starting in `[from, to)`.
fn count_range(bits: &BitSlice<u64, Lsb0>, k: usize, from: usize, to: usize) -> FactorCounts {
    if k <= 64 {
        // the packed window is itself a collision-free key
        let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        let mut counts: HashMap<u64, u64> = HashMap::new();
        let mut v = bits[from..from + k].iter().fold(0u64, |a, b| (a << 1) | *b as u64);
        *counts.entry(v).or_insert(0) += 1;
        for i in from + 1..to {
            v = ((v << 1) | bits[i + k - 1] as u64) & mask;
            *counts.entry(v).or_insert(0) += 1;
        }
        return counts.into_iter().map(|(v, c)| (BitWord::from_u64(v, k), c)).collect();
    }
    // polynomial rolling hash mod 2^61 - 1; colliding keys are split by comparing slices
    const M: u128 = (1 << 61) - 1;
    const B: u128 = 1_000_003;
    let mut top = 1u128;
    for _ in 1..k {
        top = top * B % M;
    }
    let mut buckets: HashMap<u64, Vec<(usize, u64)>> = HashMap::new();
    let mut h = bits[from..from + k].iter().fold(0u128, |a, b| (a * B + *b as u128 + 1) % M);
    for i in from..to {
        if i > from {
            let out = bits[i - 1] as u128 + 1;
            h = (h + M * M - out * top % M) % M;
            h = (h * B + bits[i + k - 1] as u128 + 1) % M;
        }
        let bucket = buckets.entry(h as u64).or_default();
        let here = &bits[i..i + k];
        match bucket.iter_mut().find(|(s, _)| bits[*s..*s + k] == here) {
            Some((_, c)) => *c += 1,
            None => bucket.push((i, 1)),
        }
    }
    buckets.into_values().flatten().map(|(s, c)| (BitWord::from_slice(&bits[s..s + k]), c)).collect()
}

/// Factor counts of a word of length `len` with period `p`, given only its
/// prefix of length `min(len, p + k - 1)`: the window at `i` equals the window
/// at `i mod p`, and residue `r` occurs `floor((len - k - r) / p) + 1` times.
pub fn factor_multiset_periodic(prefix: &BitWord, len: u64, p: u64, k: usize) -> Result<FactorCounts> {
    if k == 0 || k as u64 > len {
        return Err(Error::Precondition(format!("factor length {k} must be in 1..={len}")));
    }
    let need = len.min(p + k as u64 - 1) as usize;
    if prefix.len() < need {
        return Err(Error::Precondition(format!("periodic count needs a prefix of length {need}")));
    }
    let last = len - k as u64;
    let mut out = FactorCounts::new();
    for r in 0..p.min(last + 1) {
        let c = (last - r) / p + 1;
        *out.entry(prefix.window(r as usize, k)).or_insert(0) += c;
    }
    Ok(out)
}
