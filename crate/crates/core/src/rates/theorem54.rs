use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::certified::CertifiedValue;
use crate::entropy::{EntropyFunction, HFunction, EVAL_REL_SLACK};
use crate::error::{Error, Result};
use crate::orbit::{name_measures_symbolic, names_entropy};
use crate::rank_one::{AlignedSet, RankOneSystem};
use crate::scalar::{enclose_f64, rat_int, Rational};
use crate::words::period_of;

/// `psi(mu) / 8 = 2 mu (1 - mu) / 8`.
pub fn lambda_e(mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::Precondition(format!("mu(E) must lie in (0, 1), got {mu}")));
    }
    Ok(mu * (1.0 - mu) / 4.0)
}

/// Enclosure of `lambda_e` over an interval of measures.
pub fn lambda_e_certified(mu: &CertifiedValue) -> Result<CertifiedValue> {
    let a = lambda_e(mu.lower)?;
    let b = lambda_e(mu.upper)?;
    let hi = if mu.lower <= 0.5 && 0.5 <= mu.upper { 1.0 / 16.0 } else { a.max(b) };
    Ok(CertifiedValue::new(a.min(b), hi).widen_rel(EVAL_REL_SLACK))
}

/// Certified `mu(E)` for a tower-aligned set, normalised at stage `m`.
pub fn measure_of(sys: &RankOneSystem, e: &AlignedSet, m: usize) -> Result<CertifiedValue> {
    let mass = sys.aligned_intervals(e)?.measure();
    let (l, _) = sys.normalizer(m)?;
    Ok(CertifiedValue::new(enclose_f64(&(&mass / &l.upper)).0, enclose_f64(&(&mass / &l.lower)).1))
}

/// Windows of length `k` over the stage-`m` word, tallied by the period of
/// the name they carry and by whether their start level lies in the stage-`n`
/// tower.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodProfile {
    pub n: usize,
    pub stage: usize,
    pub k: u64,
    /// `(period, start in tower n) -> number of windows`.
    pub counts: BTreeMap<(u64, bool), u128>,
    /// Levels of tower `n` among the top `k - 1` levels of tower `m`, whose
    /// names are not determined at stage `m`.
    pub unknown_levels: u128,
}

impl PeriodProfile {
    /// Windows in tower `n` whose name has period at most `t`.
    pub fn in_tower_with_period_at_most(&self, t: u64) -> u128 {
        self.counts.iter().filter(|((per, inside), _)| *inside && *per <= t).map(|(_, c)| c).sum()
    }
}

/// Period of a window of a word with period `p`: a window of length at least
/// `2p` has the period of its first `2p` symbols, since any shorter period
/// combines with `p` into a period dividing `p`.
fn window_period(bits: &bitvec::slice::BitSlice<u64, bitvec::order::Lsb0>, p: Option<u64>) -> Result<u64> {
    let len = match p {
        Some(p) => bits.len().min(2 * p as usize),
        None => bits.len(),
    };
    Ok(period_of(&bits[..len])? as u64)
}

pub fn period_profile(sys: &RankOneSystem, e: &AlignedSet, n: usize, m: usize, k: u64, budget_bits: u64) -> Result<PeriodProfile> {
    if m < n {
        return Err(Error::Precondition(format!("stage {m} is below stage {n}")));
    }
    let h = sys.stage(m)?.height;
    if k == 0 || k as u128 > h {
        return Err(Error::Precondition(format!("window length {k} exceeds the {h} levels of stage {m}")));
    }
    let word = sys.base_word(m, e, budget_bits)?;
    let depth = word.depth();
    let period = (depth > 0).then(|| word.step(depth).p);
    let windows = h - k as u128 + 1;
    let distinct = match period {
        Some(p) => windows.min(p as u128),
        None => windows,
    };
    let prefix_len = distinct as u64 - 1 + k;
    let prefix = word.prefix(depth, prefix_len, budget_bits)?;
    let tower = (m > n).then(|| sys.tower_word(n, m, budget_bits)).transpose()?;
    let in_tower = |i: u64| tower.as_ref().is_none_or(|t| t.symbol_at(t.depth(), i));
    let mut counts = BTreeMap::new();
    for r in 0..distinct as u64 {
        let per = window_period(&prefix.bits()[r as usize..(r + k) as usize], period)?;
        let reps = match period {
            Some(p) => (windows - 1 - r as u128) / p as u128 + 1,
            None => 1,
        };
        *counts.entry((per, in_tower(r))).or_insert(0) += reps;
    }
    let unknown_levels = match &tower {
        None => k as u128 - 1,
        Some(t) => {
            // the tower word has the period of stage m, so tally by class
            let p = word.step(depth).p as u128;
            let mut c = 0u128;
            for cls in 0..p.min(k as u128 - 1) {
                let start = windows + cls;
                let class_count = (h - 1 - start) / p + 1;
                if t.symbol_at(t.depth(), (start % p) as u64) {
                    c += class_count;
                }
            }
            c
        }
    };
    Ok(PeriodProfile { n, stage: m, k, counts, unknown_levels })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem54Report {
    pub n: usize,
    pub stage: usize,
    /// Name length `2 p_n^2`.
    pub k: u64,
    pub mu_e: CertifiedValue,
    pub lambda_e: CertifiedValue,
    /// Possible values of `floor(lambda_e p_n)` given the enclosure.
    pub period_bound: (u64, u64),
    /// `mu(Q_n ∩ tower_n) / mu(tower_n)`.
    pub q_fraction: CertifiedValue,
    pub mu_r: CertifiedValue,
    pub entropy: CertifiedValue,
    /// `h(log2(t / 2))` over the possible `t`, zero when `t < 2`.
    pub h_term: CertifiedValue,
    /// `mu(R_n).lower * h_term.lower - 2`.
    pub rhs: f64,
    pub holds: bool,
    /// The same inequality against the largest admissible right side.
    pub rhs_strict: f64,
    pub holds_strict: bool,
    /// True when `t < 2`, where the right side is at most `-2`.
    pub degenerate: bool,
    /// `H / h(log2 2 p_n^2)`.
    pub ratio: CertifiedValue,
}

fn h_of_log2_half(t: u64) -> f64 {
    if t < 2 {
        0.0
    } else {
        HFunction::Ir.eval((t as f64 / 2.0).log2()).unwrap()
    }
}

/// Stage used by default: `n + 1` when built, else `n`.
pub fn theorem54_stage(sys: &RankOneSystem, n: usize) -> usize {
    if n + 1 < sys.num_stages() {
        n + 1
    } else {
        n
    }
}

/// Checks `H(g, P_k) >= mu(R_n) h(log2(floor(lambda_e p_n) / 2)) - 2` for
/// `k = 2 p_n^2` and the piecewise-profile entropy function, with all
/// quantities read off stage `m`.
pub fn theorem54_check(sys: &RankOneSystem, e: &AlignedSet, n: usize, m: Option<usize>, budget_bits: u64) -> Result<Theorem54Report> {
    if n == 0 {
        return Err(Error::Precondition("the check needs n >= 1".into()));
    }
    let m = m.unwrap_or_else(|| theorem54_stage(sys, n));
    let st_n = sys.stage(n)?.clone();
    let st_m = sys.stage(m)?.clone();
    let k = 2 * st_n.p * st_n.p;
    let mu_e = measure_of(sys, e, m)?;
    let lambda = lambda_e_certified(&mu_e)?;
    let t_lo = (lambda.lower * st_n.p as f64).floor().max(0.0) as u64;
    let t_hi = (lambda.upper * st_n.p as f64).floor() as u64;
    let profile = period_profile(sys, e, n, m, k, budget_bits)?;
    let q_lo = rat_int(profile.in_tower_with_period_at_most(t_lo)) * &st_m.level_len;
    let q_hi = rat_int(profile.in_tower_with_period_at_most(t_hi) + profile.unknown_levels) * &st_m.level_len;
    let q_hi = if q_hi > st_n.x { st_n.x.clone() } else { q_hi };
    let q_fraction = CertifiedValue::new(enclose_f64(&(&q_lo / &st_n.x)).0, enclose_f64(&(&q_hi / &st_n.x)).1);
    let (l, _) = sys.normalizer(m)?;
    let r_lo: Rational = (&st_n.x - &q_hi) / &l.upper;
    let r_hi: Rational = (&st_n.x - &q_lo) / &l.lower;
    let mu_r = CertifiedValue::new(enclose_f64(&r_lo).0, enclose_f64(&r_hi).1);
    let g = EntropyFunction::gir();
    let names = name_measures_symbolic(sys, m, e, k as usize, budget_bits)?;
    let entropy = names_entropy(&g, &names);
    let h_term = CertifiedValue::new(h_of_log2_half(t_lo), h_of_log2_half(t_hi)).widen_rel(EVAL_REL_SLACK);
    let rhs = mu_r.lower * h_term.lower - 2.0;
    let rhs_strict = mu_r.upper * h_term.upper - 2.0;
    let scale = CertifiedValue::point(HFunction::Ir.eval((k as f64).log2())?).widen_rel(EVAL_REL_SLACK);
    Ok(Theorem54Report {
        n,
        stage: m,
        k,
        mu_e,
        lambda_e: lambda,
        period_bound: (t_lo, t_hi),
        q_fraction,
        mu_r,
        entropy: entropy.clone(),
        h_term,
        rhs,
        holds: entropy.lower >= rhs,
        rhs_strict,
        holds_strict: entropy.lower >= rhs_strict,
        degenerate: t_hi < 2,
        ratio: entropy.div_positive(&scale),
    })
}
