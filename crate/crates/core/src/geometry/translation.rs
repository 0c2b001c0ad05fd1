use serde::{Deserialize, Serialize};

use super::IntervalSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Image,
    Preimage,
}

/// Interval exchange-like map: each source `[a, b)` is shifted by its offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseTranslation<T> {
    /// Sorted by source start.
    pieces: Vec<(T, T, T)>,
    /// Indices into `pieces` sorted by image start.
    #[serde(skip)]
    by_image: Vec<usize>,
}

/// Result of pushing a set through a partial map.
#[derive(Clone, Debug, PartialEq)]
pub struct Mapped<T> {
    pub set: IntervalSet<T>,
    /// Part of the input outside the domain (image) or range (preimage).
    pub uncovered: IntervalSet<T>,
}

impl<T: Scalar> PiecewiseTranslation<T> {
    /// Pieces are `(a, b, offset)`; sources and images must each be disjoint.
    pub fn new(mut pieces: Vec<(T, T, T)>) -> Result<Self> {
        if let Some((a, b, _)) = pieces.iter().find(|(a, b, _)| !(a < b)) {
            return Err(Error::EmptyInterval { lo: format!("{a:?}"), hi: format!("{b:?}") });
        }
        pieces.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        if pieces.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err(Error::Precondition("translation sources overlap".into()));
        }
        let mut by_image: Vec<usize> = (0..pieces.len()).collect();
        let start = |i: usize| pieces[i].0.clone() + pieces[i].2.clone();
        by_image.sort_by(|&i, &j| start(i).partial_cmp(&start(j)).unwrap());
        for w in by_image.windows(2) {
            let (p, q) = (&pieces[w[0]], &pieces[w[1]]);
            if p.1.clone() + p.2.clone() > q.0.clone() + q.2.clone() {
                return Err(Error::Precondition("translation images overlap".into()));
            }
        }
        Ok(Self { pieces, by_image })
    }

    pub fn identity(a: T, b: T) -> Result<Self> {
        Self::new(vec![(a, b, T::zero())])
    }

    pub fn pieces(&self) -> &[(T, T, T)] {
        &self.pieces
    }

    pub fn domain(&self) -> IntervalSet<T> {
        IntervalSet::from_sorted(self.pieces.iter().map(|(a, b, _)| (a.clone(), b.clone())).collect())
    }

    pub fn range(&self) -> IntervalSet<T> {
        IntervalSet::from_sorted(self.images().collect())
    }

    fn images(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.by_image.iter().map(|&i| {
            let (a, b, t) = &self.pieces[i];
            (a.clone() + t.clone(), b.clone() + t.clone())
        })
    }

    /// Image or preimage of `s`, sweeping `s` against the sorted pieces.
    pub fn map_set(&self, s: &IntervalSet<T>, dir: Direction) -> Mapped<T> {
        let (windows, shifts): (Vec<(T, T)>, Vec<T>) = match dir {
            Direction::Image => self.pieces.iter().map(|(a, b, t)| ((a.clone(), b.clone()), t.clone())).unzip(),
            Direction::Preimage => self
                .by_image
                .iter()
                .map(|&i| {
                    let (a, b, t) = &self.pieces[i];
                    ((a.clone() + t.clone(), b.clone() + t.clone()), T::zero() - t.clone())
                })
                .unzip(),
        };
        let xs = s.intervals();
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < xs.len() && j < windows.len() {
            let lo = if xs[i].0 >= windows[j].0 { &xs[i].0 } else { &windows[j].0 };
            let hi = if xs[i].1 <= windows[j].1 { &xs[i].1 } else { &windows[j].1 };
            if lo < hi {
                out.push((lo.clone() + shifts[j].clone(), hi.clone() + shifts[j].clone()));
            }
            if xs[i].1 < windows[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        let covered = IntervalSet::from_sorted(windows);
        let set = IntervalSet::canonicalize(out).expect("pieces are nonempty");
        Mapped { set, uncovered: s.diff(&covered) }
    }

    /// Every piece keeps its length and images are disjoint, so the map
    /// preserves Lebesgue measure on its domain.
    pub fn preserves_measure(&self) -> bool {
        self.domain().measure() == self.range().measure()
    }

    /// Whether `other` agrees with `self` wherever `self` is defined.
    pub fn extends(&self, other: &Self) -> bool {
        let theirs = &other.pieces;
        self.pieces.iter().all(|(a, b, t)| {
            let mut cur = a.clone();
            for (c, d, u) in theirs {
                if d <= &cur || c > &cur {
                    continue;
                }
                if u != t {
                    return false;
                }
                cur = d.clone();
                if &cur >= b {
                    return true;
                }
            }
            &cur >= b
        })
    }
}
