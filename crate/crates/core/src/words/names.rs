use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{period, BitWord};
use crate::certified::CertifiedValue;
use crate::error::{Error, Result};

/// Normalised measures of name atoms `A(s)` for names of a fixed length,
/// plus the mass not accounted for by any listed name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NameMultiset {
    pub k: usize,
    pub entries: BTreeMap<BitWord, CertifiedValue>,
    pub residual: CertifiedValue,
}

impl NameMultiset {
    pub fn new(k: usize, entries: BTreeMap<BitWord, CertifiedValue>, residual: CertifiedValue) -> Result<Self> {
        if let Some((w, _)) = entries.iter().find(|(w, _)| w.len() != k) {
            return Err(Error::Precondition(format!("name {w} has length {}, expected {k}", w.len())));
        }
        if entries.values().any(|m| m.lower < 0.0) || residual.lower < 0.0 {
            return Err(Error::Precondition("name measures must be nonnegative".into()));
        }
        Ok(Self { k, entries, residual })
    }

    /// Certified total of the listed entries.
    pub fn listed_mass(&self) -> CertifiedValue {
        self.entries.values().cloned().sum()
    }

    /// Whether the entries and residual can account for total mass one.
    pub fn is_consistent(&self) -> bool {
        let total = &self.listed_mass() + &self.residual;
        total.lower <= 1.0 && 1.0 <= total.upper
    }

    /// Certified measure of names whose period lies in `[p, q]`. The residual
    /// may hide further such names, so it is added to the upper end.
    pub fn period_range_measure(&self, p: usize, q: usize) -> Result<CertifiedValue> {
        if p < 1 || p > q {
            return Err(Error::Precondition(format!("period range [{p}, {q}] is empty")));
        }
        let mut acc = CertifiedValue::zero();
        for (w, m) in &self.entries {
            let per = period(w)?;
            if (p..=q).contains(&per) {
                acc = &acc + m;
            }
        }
        Ok(&acc + &CertifiedValue::new(0.0, self.residual.upper))
    }

    /// Names violating `mu(A(s)) <= 1/period(s) + residual`.
    pub fn period_bound_violations(&self) -> Vec<BitWord> {
        self.entries
            .iter()
            .filter(|(w, m)| {
                let per = period(w).unwrap() as f64;
                m.upper > (1.0 / per + self.residual.upper) * (1.0 + 1e-12)
            })
            .map(|(w, _)| w.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_ranges() {
        // all 2^3 names of length 3, uniform mass
        let entries: BTreeMap<BitWord, CertifiedValue> = (0..8).map(|v| (BitWord::from_u64(v, 3), CertifiedValue::point(0.125))).collect();
        let nm = NameMultiset::new(3, entries, CertifiedValue::zero()).unwrap();
        assert!(nm.is_consistent());
        let all = nm.period_range_measure(1, 3).unwrap();
        assert!(all.contains(&1.0));
        // 000, 111 have period 1; 010, 101 period 2; the other four period 3
        assert!(nm.period_range_measure(3, 3).unwrap().contains(&0.5));
        assert!(nm.period_range_measure(1, 1).unwrap().contains(&0.25));
        assert!(nm.period_range_measure(2, 1).is_err());
        assert!(nm.period_bound_violations().is_empty());
    }

    #[test]
    fn residual_only_widens_upper() {
        let entries = [("01".parse().unwrap(), CertifiedValue::point(0.5))].into_iter().collect();
        let nm = NameMultiset::new(2, entries, CertifiedValue::new(0.1, 0.5)).unwrap();
        let m = nm.period_range_measure(2, 2).unwrap();
        assert_eq!(m.lower, 0.5);
        assert!(m.upper >= 1.0);
        assert!(NameMultiset::new(3, nm.entries.clone(), CertifiedValue::zero()).is_err());
    }
}
