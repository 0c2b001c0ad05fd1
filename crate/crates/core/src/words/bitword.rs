use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Bit-packed word over `{0, 1}`. Ordered lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitWord(BitVec<u64, Lsb0>);

impl BitWord {
    pub fn new() -> Self {
        Self(BitVec::new())
    }

    pub fn zeros(n: usize) -> Self {
        Self(bitvec![u64, Lsb0; 0; n])
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().collect())
    }

    pub fn from_slice(bits: &BitSlice<u64, Lsb0>) -> Self {
        Self(bits.to_bitvec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.0.set(i, v);
    }

    pub fn push(&mut self, v: bool) {
        self.0.push(v);
    }

    pub fn extend_from(&mut self, other: &BitWord) {
        self.0.extend_from_bitslice(&other.0);
    }

    pub fn bits(&self) -> &BitSlice<u64, Lsb0> {
        &self.0
    }

    pub fn bits_mut(&mut self) -> &mut BitSlice<u64, Lsb0> {
        &mut self.0
    }

    pub fn window(&self, start: usize, k: usize) -> BitWord {
        Self(self.0[start..start + k].to_bitvec())
    }

    pub fn count_ones(&self) -> usize {
        self.0.count_ones()
    }

    pub fn repeat(&self, times: usize) -> BitWord {
        let mut out = BitVec::with_capacity(self.len() * times);
        for _ in 0..times {
            out.extend_from_bitslice(&self.0);
        }
        Self(out)
    }

    /// Packs a word of length at most 64 into an integer, first symbol most significant.
    pub fn to_u64(&self) -> Option<u64> {
        (self.len() <= 64).then(|| self.0.iter().fold(0u64, |acc, b| (acc << 1) | *b as u64))
    }

    pub fn from_u64(v: u64, k: usize) -> Self {
        Self::from_bits((0..k).rev().map(|i| (v >> i) & 1 == 1))
    }

    /// `[[bit, run], ...]`.
    pub fn runs(&self) -> Vec<(u8, usize)> {
        let mut out: Vec<(u8, usize)> = Vec::new();
        for b in self.0.iter() {
            let b = *b as u8;
            match out.last_mut() {
                Some((v, n)) if *v == b => *n += 1,
                _ => out.push((b, 1)),
            }
        }
        out
    }

    pub fn from_runs(runs: &[(u8, usize)]) -> Result<Self> {
        let mut out = BitVec::new();
        for &(b, n) in runs {
            if b > 1 {
                return Err(Error::Parse(format!("run symbol must be 0 or 1, got {b}")));
            }
            out.extend(std::iter::repeat_n(b == 1, n));
        }
        Ok(Self(out))
    }

    pub fn to_rle_json(&self) -> String {
        serde_json::to_string(&self.runs()).unwrap()
    }

    pub fn from_rle_json(s: &str) -> Result<Self> {
        let runs: Vec<(u8, usize)> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_runs(&runs)
    }
}

impl FromStr for BitWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("word symbols must be 0 or 1, got {c:?}"))),
            })
            .collect::<Result<BitVec<u64, Lsb0>>>()
            .map(Self)
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0.iter() {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

impl Serialize for BitWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Smallest `k >= 1` with `s[i] = s[i + k]` wherever both are defined,
/// i.e. `n` minus the longest proper border.
pub fn period(s: &BitWord) -> Result<usize> {
    period_of(s.bits())
}

pub fn period_of(s: &BitSlice<u64, Lsb0>) -> Result<usize> {
    let n = s.len();
    if n == 0 {
        return Err(Error::Precondition("period of the empty word".into()));
    }
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = fail[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i] = k;
    }
    Ok(n - fail[n - 1])
}
