//! Shared generators and oracles for the integration tests.
#![allow(dead_code)]

use gentropy::entropy::Tabulated;
use gentropy::scalar::{rat, rat_int};
use gentropy::{BitWord, EntropyFunction, IntervalSet, LabeledPartition, Rational};
use num_traits::{Signed, Zero};
use rand::Rng;

pub fn catalog() -> Vec<EntropyFunction> {
    vec![
        EntropyFunction::eta(),
        EntropyFunction::g0(2.0).unwrap(),
        EntropyFunction::g0(3.0).unwrap(),
        EntropyFunction::gtilde(2.0, 0.5).unwrap(),
        EntropyFunction::gir(),
        EntropyFunction::gm(0),
        EntropyFunction::gm(1),
        EntropyFunction::gm(2),
    ]
}

/// Smallest `p` with `w[i] = w[i + p]` for every valid `i`.
pub fn brute_period(w: &BitWord) -> usize {
    let n = w.len();
    (1..=n).find(|&p| (0..n - p).all(|i| w.get(i) == w.get(i + p))).unwrap()
}

/// Sorted distinct cut points `a / d` strictly inside `(0, 1)`.
fn random_cuts<R: Rng>(rng: &mut R, count: usize, d: i64) -> Vec<Rational> {
    let mut nums: Vec<i64> = (0..count).map(|_| rng.gen_range(1..d)).collect();
    nums.sort_unstable();
    nums.dedup();
    nums.into_iter().map(|a| rat(a, d)).collect()
}

fn segments(cuts: &[Rational]) -> Vec<(Rational, Rational)> {
    let mut pts = vec![rat(0, 1)];
    pts.extend(cuts.iter().cloned());
    pts.push(rat(1, 1));
    pts.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
}

/// Partition of `[0, 1)` into at most `max_atoms` atoms, each a union of
/// random segments, with at least two nonempty atoms.
pub fn random_partition<R: Rng>(rng: &mut R, max_atoms: usize) -> LabeledPartition<Rational> {
    let d = rng.gen_range(2..=1000);
    let count = rng.gen_range(1..=12);
    let cuts = random_cuts(rng, count, d);
    let segs = segments(&cuts);
    let atoms = rng.gen_range(2..=max_atoms.max(2));
    let mut raw: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); atoms];
    for (i, s) in segs.into_iter().enumerate() {
        let label = if i < 2 { i } else { rng.gen_range(0..atoms) };
        raw[label].push(s);
    }
    let atoms = raw
        .into_iter()
        .enumerate()
        .map(|(i, r)| (format!("A{i}"), if r.is_empty() { IntervalSet::empty() } else { IntervalSet::canonicalize(r).unwrap() }))
        .collect();
    LabeledPartition::new(atoms, (rat(0, 1), rat(1, 1))).unwrap()
}

/// Random finite union of rational intervals inside `[0, 1)`.
pub fn random_set<R: Rng>(rng: &mut R) -> IntervalSet<Rational> {
    let d = rng.gen_range(2..=1000);
    let count = rng.gen_range(1..=16);
    let cuts = random_cuts(rng, count, d);
    let keep: Vec<_> = segments(&cuts).into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    if keep.is_empty() {
        IntervalSet::empty()
    } else {
        IntervalSet::canonicalize(keep).unwrap()
    }
}

/// Nonnegative rationals with sum at most one.
pub fn random_masses<R: Rng>(rng: &mut R, max_len: usize) -> Vec<Rational> {
    let n = rng.gen_range(1..=max_len);
    let c: Vec<u64> = (0..n).map(|_| if rng.gen_bool(0.2) { 0 } else { rng.gen_range(1..1000) }).collect();
    let total: u64 = c.iter().sum::<u64>() + rng.gen_range(0..1000);
    let total = total.max(1);
    c.into_iter().map(|v| rat_int(v) / rat_int(total)).collect()
}

/// Random concave piecewise-linear `g` with `g(0) = 0` and rational vertices.
pub fn exact_tabulation<R: Rng>(rng: &mut R) -> Tabulated {
    let d = rng.gen_range(2..=64);
    let count = rng.gen_range(1..=6);
    let cuts = random_cuts(rng, count, d);
    let mut slopes: Vec<i64> = (0..=cuts.len()).map(|_| rng.gen_range(-40..=60)).collect();
    slopes.sort_unstable_by(|a, b| b.cmp(a));
    let mut pts = vec![(rat(0, 1), rat(0, 1))];
    let mut xs = cuts;
    xs.push(rat(1, 1));
    for (x, s) in xs.into_iter().zip(slopes) {
        let (px, py) = pts.last().unwrap().clone();
        let y = &py + rat(s, 8) * (&x - &px);
        pts.push((x, y));
    }
    Tabulated::new(pts).unwrap()
}

/// Exact quantities of a piecewise-linear tabulation, computed from its vertices.
pub struct TabOracle {
    pts: Vec<(Rational, Rational)>,
}

impl TabOracle {
    pub fn new(t: &Tabulated) -> Self {
        Self { pts: t.points().to_vec() }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let i = self.pts.windows(2).position(|w| x <= &w[1].0).unwrap();
        let (x0, y0) = &self.pts[i];
        let (x1, y1) = &self.pts[i + 1];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn max(&self) -> Rational {
        self.pts.iter().map(|p| p.1.clone()).max().unwrap()
    }

    /// `max g - min g`; a concave `g` has its minimum at an endpoint.
    pub fn d_max(&self) -> Rational {
        let g1 = self.pts.last().unwrap().1.clone();
        let min = if g1 < Rational::zero() { g1 } else { Rational::zero() };
        self.max() - min
    }

    /// Slope of the piece ending at or containing `1/2` from the left.
    pub fn left_derivative_half(&self) -> Rational {
        let half = rat(1, 2);
        let i = self.pts.windows(2).position(|w| w[0].0 < half && half <= w[1].0).unwrap();
        let (x0, y0) = &self.pts[i];
        let (x1, y1) = &self.pts[i + 1];
        ((y1 - y0) / (x1 - x0)).abs()
    }
}
