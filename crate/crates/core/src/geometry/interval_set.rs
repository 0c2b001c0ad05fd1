use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Finite union of half-open intervals `[a, b)`, kept sorted, disjoint and
/// gap-separated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalSet<T> {
    intervals: Vec<(T, T)>,
}

impl<T: Scalar> Default for IntervalSet<T> {
    fn default() -> Self {
        Self::empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Intersect,
    Union,
    Diff,
}

impl<T: Scalar> IntervalSet<T> {
    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn interval(a: T, b: T) -> Result<Self> {
        Self::canonicalize(vec![(a, b)])
    }

    /// Sorts and merges overlapping or adjacent intervals. Rejects `a >= b`.
    pub fn canonicalize(mut raw: Vec<(T, T)>) -> Result<Self> {
        if let Some((a, b)) = raw.iter().find(|(a, b)| !(a < b)) {
            return Err(Error::EmptyInterval { lo: format!("{a:?}"), hi: format!("{b:?}") });
        }
        raw.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        Ok(Self { intervals: merge_sorted(raw) })
    }

    /// Trusts the caller that `raw` is sorted, disjoint and nonempty per piece;
    /// only adjacent pieces are merged.
    pub(crate) fn from_sorted(raw: Vec<(T, T)>) -> Self {
        debug_assert!(raw.iter().all(|(a, b)| a < b));
        debug_assert!(raw.windows(2).all(|w| w[0].1 <= w[1].0));
        Self { intervals: merge_sorted(raw) }
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn into_intervals(self) -> Vec<(T, T)> {
        self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn measure(&self) -> T {
        self.intervals.iter().fold(T::zero(), |acc, (a, b)| acc + (b.clone() - a.clone()))
    }

    pub fn contains(&self, x: &T) -> bool {
        let i = self.intervals.partition_point(|(_, b)| b <= x);
        i < self.intervals.len() && &self.intervals[i].0 <= x
    }

    /// Infimum and supremum, if nonempty.
    pub fn hull(&self) -> Option<(T, T)> {
        Some((self.intervals.first()?.0.clone(), self.intervals.last()?.1.clone()))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.diff(other).is_empty()
    }

    pub fn translate(&self, t: &T) -> Self {
        Self { intervals: self.intervals.iter().map(|(a, b)| (a.clone() + t.clone(), b.clone() + t.clone())).collect() }
    }

    pub fn apply(&self, op: SetOp, other: &Self) -> Self {
        match op {
            SetOp::Intersect => self.intersect(other),
            SetOp::Union => self.union(other),
            SetOp::Diff => self.diff(other),
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (x, y) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < x.len() && j < y.len() {
            let lo = max_ref(&x[i].0, &y[j].0);
            let hi = min_ref(&x[i].1, &y[j].1);
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if x[i].1 < y[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { intervals: out }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all: Vec<(T, T)> = Vec::with_capacity(self.len() + other.len());
        let (x, y) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        while i < x.len() || j < y.len() {
            if j == y.len() || (i < x.len() && x[i].0 <= y[j].0) {
                all.push(x[i].clone());
                i += 1;
            } else {
                all.push(y[j].clone());
                j += 1;
            }
        }
        Self { intervals: merge_sorted(all) }
    }

    pub fn diff(&self, other: &Self) -> Self {
        let y = &other.intervals;
        let mut out = Vec::new();
        let mut j = 0;
        for (a, b) in &self.intervals {
            let mut cur = a.clone();
            while j < y.len() && &y[j].1 <= a {
                j += 1;
            }
            let mut k = j;
            while k < y.len() && &y[k].0 < b {
                if y[k].0 > cur {
                    out.push((cur.clone(), y[k].0.clone()));
                }
                if y[k].1 > cur {
                    cur = y[k].1.clone();
                }
                k += 1;
            }
            if &cur < b {
                out.push((cur, b.clone()));
            }
        }
        Self { intervals: out }
    }

    pub fn complement(&self, ambient: &(T, T)) -> Result<Self> {
        let amb = Self::interval(ambient.0.clone(), ambient.1.clone())?;
        if !self.is_subset(&amb) {
            return Err(Error::AmbientMismatch("set is not contained in the ambient interval".into()));
        }
        Ok(amb.diff(self))
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for IntervalSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "[{a}, {b})")?;
        }
        f.write_str("}")
    }
}

fn max_ref<'a, T: PartialOrd>(a: &'a T, b: &'a T) -> &'a T {
    if a >= b {
        a
    } else {
        b
    }
}

fn min_ref<'a, T: PartialOrd>(a: &'a T, b: &'a T) -> &'a T {
    if a <= b {
        a
    } else {
        b
    }
}

fn merge_sorted<T: Scalar>(raw: Vec<(T, T)>) -> Vec<(T, T)> {
    let mut out: Vec<(T, T)> = Vec::with_capacity(raw.len());
    for (a, b) in raw {
        match out.last_mut() {
            Some(last) if a <= last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    out
}
