use std::collections::BTreeMap;

use super::symbolic::normalized_names;
use crate::error::{Error, Result};
use crate::geometry::{Direction, IntervalSet};
use crate::rank_one::RankOneSystem;
use crate::scalar::{rat_int, Rational};
use crate::words::{BitWord, NameMultiset};

/// Atoms of `P_n` inside the stage tower, keyed by name, plus the points
/// whose first `n` iterates are not all defined by the stage map.
#[derive(Clone, Debug, PartialEq)]
pub struct JoinStep {
    pub n: usize,
    pub atoms: BTreeMap<BitWord, IntervalSet<Rational>>,
    pub uncovered: IntervalSet<Rational>,
}

impl JoinStep {
    pub fn covered_mass(&self) -> Rational {
        self.atoms.values().fold(rat_int(0), |acc, a| acc + a.measure())
    }
}

/// `P_1, ..., P_(n_max)` for `P = {E, X \ E}` restricted to `[0, x_m)`,
/// built by pulling each atom back one step under the stage map and
/// splitting by `E`.
pub fn join_sequence_geometric(
    sys: &RankOneSystem,
    e: &IntervalSet<Rational>,
    n_max: usize,
    m: usize,
    max_pieces: u128,
) -> Result<Vec<JoinStep>> {
    let st = sys.stage(m)?;
    if n_max == 0 || n_max as u128 >= st.height {
        return Err(Error::Precondition(format!("join length {n_max} must be in 1..{} at stage {m}", st.height)));
    }
    let map = sys.stage_map(m, max_pieces)?;
    let tower = IntervalSet::interval(rat_int(0), st.x.clone())?;
    let e = e.intersect(&tower);
    let not_e = tower.diff(&e);
    let split = |set: &IntervalSet<Rational>, tail: Option<&BitWord>, out: &mut BTreeMap<BitWord, IntervalSet<Rational>>| {
        for (bit, part) in [(true, set.intersect(&e)), (false, set.intersect(&not_e))] {
            if part.is_empty() {
                continue;
            }
            let mut name = BitWord::from_bits([bit]);
            if let Some(t) = tail {
                name.extend_from(t);
            }
            out.insert(name, part);
        }
    };
    let mut first = BTreeMap::new();
    split(&tower, None, &mut first);
    let mut steps = vec![JoinStep { n: 1, atoms: first, uncovered: IntervalSet::empty() }];
    for n in 2..=n_max {
        let prev = steps.last().unwrap();
        let mut atoms = BTreeMap::new();
        for (name, atom) in &prev.atoms {
            let back = map.map_set(atom, Direction::Preimage).set;
            split(&back, Some(name), &mut atoms);
        }
        let covered = atoms.values().fold(IntervalSet::empty(), |acc: IntervalSet<Rational>, a| acc.union(a));
        let uncovered = tower.diff(&covered);
        steps.push(JoinStep { n, atoms, uncovered });
    }
    Ok(steps)
}

/// Normalised name measures of one join step.
pub fn geometric_names(sys: &RankOneSystem, m: usize, step: &JoinStep) -> Result<NameMultiset> {
    let covered = step.covered_mass();
    let entries = step.atoms.iter().map(|(w, a)| (w.clone(), a.measure())).collect();
    normalized_names(sys, m, step.n, entries, &covered)
}
