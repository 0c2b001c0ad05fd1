use std::collections::BTreeMap;

use crate::certified::CertifiedValue;
use crate::error::{Error, Result};
use crate::rank_one::{AlignedSet, RankOneSystem};
use crate::scalar::{enclose_f64, rat_int, Rational};
use crate::words::{FactorCounts, NameMultiset};

/// Smallest built stage whose tower has at least `4k` levels, else the
/// tallest built stage that still has `k` levels.
pub fn default_stage(sys: &RankOneSystem, k: usize) -> Result<usize> {
    let st = sys.stages();
    if let Some(s) = st.iter().find(|s| s.height >= 4 * k as u128) {
        return Ok(s.n);
    }
    st.iter()
        .rev()
        .find(|s| s.height >= k as u128)
        .map(|s| s.n)
        .ok_or_else(|| Error::Precondition(format!("no built stage has {k} levels")))
}

/// Length-`k` factors of the stage-`m` base word with their window counts.
pub fn symbolic_counts(sys: &RankOneSystem, m: usize, e: &AlignedSet, k: usize, budget_bits: u64) -> Result<FactorCounts> {
    let st = sys.stage(m)?;
    if k == 0 || k as u128 > st.height {
        return Err(Error::Precondition(format!("name length {k} must be in 1..={}", st.height)));
    }
    let word = sys.base_word(m, e, budget_bits)?;
    word.factor_counts(word.depth(), k, budget_bits)
}

/// Names of length `k` read off the stage-`m` tower. A window starting at
/// level `i` is the name of every point of that level, so each factor gets
/// measure `count * l_m`; the top `k - 1` levels and the space above the
/// tower form the residual.
pub fn name_measures_symbolic(sys: &RankOneSystem, m: usize, e: &AlignedSet, k: usize, budget_bits: u64) -> Result<NameMultiset> {
    let counts = symbolic_counts(sys, m, e, k, budget_bits)?;
    let st = sys.stage(m)?;
    let windows = rat_int(st.height - k as u128 + 1) * &st.level_len;
    let entries = counts.into_iter().map(|(w, c)| (w, rat_int(c) * &st.level_len)).collect::<Vec<_>>();
    normalized_names(sys, m, k, entries, &windows)
}

/// Normalises exact masses on `[0, x_m)` by the certified total measure.
/// `covered` is the total mass carried by the listed names.
pub(crate) fn normalized_names(
    sys: &RankOneSystem,
    m: usize,
    k: usize,
    entries: Vec<(crate::words::BitWord, Rational)>,
    covered: &Rational,
) -> Result<NameMultiset> {
    let (l, _) = sys.normalizer(m)?;
    let map: BTreeMap<_, _> = entries
        .into_iter()
        .map(|(w, mass)| (w, CertifiedValue::new(enclose_f64(&(&mass / &l.upper)).0, enclose_f64(&(&mass / &l.lower)).1)))
        .collect();
    let one = rat_int(1);
    let residual = CertifiedValue::new(enclose_f64(&(&one - covered / &l.lower)).0.max(0.0), enclose_f64(&(&one - covered / &l.upper)).1);
    NameMultiset::new(k, map, residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank_one::PrimeSeq;
    use crate::words::BitWord;

    fn sys(ps: &[u64]) -> RankOneSystem {
        RankOneSystem::build(PrimeSeq::new(ps.to_vec()).unwrap(), ps.len()).unwrap()
    }

    #[test]
    fn two_letter_names() {
        let s = sys(&[2, 29]);
        let counts = symbolic_counts(&s, 1, &AlignedSet::unit(), 2, 1 << 20).unwrap();
        // per period of 29 the block U 0000 has 3 "10", 3 "01", 23 "00"; the
        // leading 1 has no predecessor, so one "01" is lost
        let w = |s: &str| s.parse::<BitWord>().unwrap();
        assert_eq!(counts[&w("10")], 58 * 3);
        assert_eq!(counts[&w("01")], 58 * 3 - 1);
        assert_eq!(counts[&w("00")], 58 * 23);
        assert_eq!(counts.values().sum::<u64>(), 1681);
        assert!(!counts.contains_key(&w("11")));
    }

    #[test]
    fn window_mass_conservation() {
        let s = sys(&[2, 29]);
        let st = s.stage(1).unwrap();
        for k in [1, 2, 8, 29, 100] {
            let counts = symbolic_counts(&s, 1, &AlignedSet::unit(), k, 1 << 20).unwrap();
            let total: u64 = counts.values().sum();
            let mass = rat_int(total) * &st.level_len + rat_int(k as u64 - 1) * &st.level_len;
            assert_eq!(mass, st.x);
        }
    }

    #[test]
    fn single_symbol_names_match_mass() {
        let s = sys(&[2, 29]);
        let names = name_measures_symbolic(&s, 1, &AlignedSet::unit(), 1, 1 << 20).unwrap();
        // stage-relative: mu(E) = 1 / (29/3) = 3/29
        let one = &names.entries[&"1".parse().unwrap()];
        assert!(one.contains(&(3.0 / 29.0)));
        assert!(names.residual.upper < 1e-15);
        assert!(names.is_consistent());
    }

    #[test]
    fn default_stage_rule() {
        let s = sys(&[2, 29, 5051]);
        assert_eq!(default_stage(&s, 2).unwrap(), 0);
        assert_eq!(default_stage(&s, 29).unwrap(), 1);
        assert_eq!(default_stage(&s, 1682).unwrap(), 2);
    }
}
