use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::IntervalSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Finite partition of an ambient interval `[0, L)` into labelled atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPartition<T> {
    atoms: Vec<(String, IntervalSet<T>)>,
    ambient: (T, T),
}

impl<T: Scalar> LabeledPartition<T> {
    /// Checks that the atoms are pairwise disjoint and cover `ambient` exactly.
    /// Empty atoms are dropped.
    pub fn new(atoms: Vec<(String, IntervalSet<T>)>, ambient: (T, T)) -> Result<Self> {
        let atoms: Vec<_> = atoms.into_iter().filter(|(_, s)| !s.is_empty()).collect();
        let mut pieces: Vec<(T, T)> = atoms.iter().flat_map(|(_, s)| s.intervals().iter().cloned()).collect();
        pieces.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut cursor = ambient.0.clone();
        for (a, b) in &pieces {
            if *a != cursor {
                let what = if *a < cursor { "atoms overlap" } else { "atoms leave a gap" };
                return Err(Error::AmbientMismatch(format!("{what} at {a:?}")));
            }
            cursor = b.clone();
        }
        if cursor != ambient.1 {
            return Err(Error::AmbientMismatch(format!("atoms end at {cursor:?}, ambient ends at {:?}", ambient.1)));
        }
        Ok(Self { atoms, ambient })
    }

    /// `{E, ambient \ E}` labelled `"1"` and `"0"`.
    pub fn two_set(e: &IntervalSet<T>, ambient: (T, T)) -> Result<Self> {
        let rest = e.complement(&ambient)?;
        Self::new(vec![("1".into(), e.clone()), ("0".into(), rest)], ambient)
    }

    pub fn trivial(ambient: (T, T)) -> Result<Self> {
        let s = IntervalSet::interval(ambient.0.clone(), ambient.1.clone())?;
        Self::new(vec![("*".into(), s)], ambient)
    }

    pub fn atoms(&self) -> &[(String, IntervalSet<T>)] {
        &self.atoms
    }

    pub fn ambient(&self) -> &(T, T) {
        &self.ambient
    }

    pub fn card(&self) -> usize {
        self.atoms.len()
    }

    pub fn measures(&self) -> impl Iterator<Item = T> + '_ {
        self.atoms.iter().map(|(_, s)| s.measure())
    }

    /// Common refinement: nonempty intersections `A ∩ B`, labelled by
    /// concatenating the labels, in order of the `(A, B)` index pair.
    pub fn join(&self, other: &Self) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch(format!("{:?} vs {:?}", self.ambient, other.ambient)));
        }
        let x = flatten(self);
        let y = flatten(other);
        let mut cells: BTreeMap<(usize, usize), Vec<(T, T)>> = BTreeMap::new();
        let (mut i, mut j) = (0, 0);
        while i < x.len() && j < y.len() {
            let lo = if x[i].0 >= y[j].0 { &x[i].0 } else { &y[j].0 };
            let hi = if x[i].1 <= y[j].1 { &x[i].1 } else { &y[j].1 };
            if lo < hi {
                cells.entry((x[i].2, y[j].2)).or_default().push((lo.clone(), hi.clone()));
            }
            if x[i].1 < y[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        let atoms = cells
            .into_iter()
            .map(|((a, b), v)| (format!("{}{}", self.atoms[a].0, other.atoms[b].0), IntervalSet::from_sorted(v)))
            .collect();
        Ok(Self { atoms, ambient: self.ambient.clone() })
    }
}

fn flatten<T: Scalar>(p: &LabeledPartition<T>) -> Vec<(T, T, usize)> {
    let mut v: Vec<(T, T, usize)> =
        p.atoms.iter().enumerate().flat_map(|(k, (_, s))| s.intervals().iter().map(move |(a, b)| (a.clone(), b.clone(), k))).collect();
    v.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use proptest::prelude::*;

    fn part(cuts: &[Rational], end: Rational) -> LabeledPartition<Rational> {
        let mut pts = cuts.to_vec();
        pts.push(end.clone());
        let atoms = pts
            .windows(2)
            .enumerate()
            .map(|(i, w)| (format!("{}", (b'a' + i as u8) as char), IntervalSet::interval(w[0].clone(), w[1].clone()).unwrap()))
            .collect();
        LabeledPartition::new(atoms, (rat(0, 1), end)).unwrap()
    }

    #[test]
    fn join_example() {
        let p = part(&[rat(0, 1), rat(1, 2)], rat(1, 1));
        let q = part(&[rat(0, 1), rat(1, 4)], rat(1, 1));
        let j = p.join(&q).unwrap();
        let m: Vec<Rational> = j.measures().collect();
        assert_eq!(m, vec![rat(1, 4), rat(1, 4), rat(1, 2)]);
        let pp = p.join(&p).unwrap();
        assert_eq!(pp.card(), p.card());
        assert_eq!(pp.atoms()[0].0, "aa");
    }

    #[test]
    fn rejects_bad_partitions() {
        let a = IntervalSet::interval(rat(0, 1), rat(1, 2)).unwrap();
        let b = IntervalSet::interval(rat(1, 4), rat(1, 1)).unwrap();
        assert!(LabeledPartition::new(vec![("a".into(), a.clone()), ("b".into(), b)], (rat(0, 1), rat(1, 1))).is_err());
        assert!(LabeledPartition::new(vec![("a".into(), a)], (rat(0, 1), rat(1, 1))).is_err());
        let p = part(&[rat(0, 1)], rat(1, 1));
        let q = part(&[rat(0, 1)], rat(2, 1));
        assert!(p.join(&q).is_err());
    }

    fn arb_partition() -> impl Strategy<Value = LabeledPartition<Rational>> {
        // atoms made of several intervals: label each of 24 cells with one of 4 labels
        prop::collection::vec(0usize..4, 24).prop_map(|labels| {
            let mut atoms: Vec<(String, Vec<(Rational, Rational)>)> = (0..4).map(|k| (k.to_string(), vec![])).collect();
            for (i, l) in labels.iter().enumerate() {
                atoms[*l].1.push((rat(i as i64, 24), rat(i as i64 + 1, 24)));
            }
            let atoms = atoms.into_iter().filter(|(_, v)| !v.is_empty()).map(|(l, v)| (l, IntervalSet::canonicalize(v).unwrap())).collect();
            LabeledPartition::new(atoms, (rat(0, 1), rat(1, 1))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn join_refines_and_conserves(p in arb_partition(), q in arb_partition()) {
            let j = p.join(&q).unwrap();
            prop_assert!(j.card() <= p.card() * q.card());
            let total = j.measures().fold(rat(0, 1), |a, b| a + b);
            prop_assert_eq!(total, rat(1, 1));
            for (_, s) in j.atoms() {
                prop_assert!(p.atoms().iter().any(|(_, a)| s.is_subset(a)));
                prop_assert!(q.atoms().iter().any(|(_, b)| s.is_subset(b)));
            }
            // re-validate through the checked constructor
            prop_assert!(LabeledPartition::new(j.atoms().to_vec(), j.ambient().clone()).is_ok());
        }
    }
}
