use serde::{Deserialize, Serialize};

use crate::certified::CertifiedValue;
use crate::entropy::{h_piece_index, EntropyFunction, EVAL_REL_SLACK};
use crate::error::{Error, Result};
use crate::orbit::{default_stage, name_measures_symbolic, names_entropy};
use crate::rank_one::{AlignedSet, Normalization, RankOneSystem};
use crate::scalar::{enclose_f64, rat_int, Rational};

/// `(6 sup p_(n-1)^3 / p_n + 2)(1 + sum p_(n-1)^2 / p_n) + 10` over the
/// supplied prefix. Sup and sum only see the known terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DXi0 {
    pub value: Rational,
    pub cube_ratio_sup: Rational,
    pub square_ratio_sum: Rational,
    /// Number of primes the value was computed from.
    pub prefix_len: usize,
}

impl DXi0 {
    pub fn as_f64(&self) -> CertifiedValue {
        CertifiedValue::from_rational(&self.value)
    }
}

pub fn d_xi0(primes: &[u64]) -> Result<DXi0> {
    if primes.len() < 2 {
        return Err(Error::Precondition("the constant needs at least two primes".into()));
    }
    let ps = crate::rank_one::PrimeSeq::new(primes.to_vec())?;
    let sup = ps.cube_ratio_sup().expect("two primes");
    let sum = ps.square_ratio_sum();
    let value = (rat_int(6) * &sup + rat_int(2)) * (rat_int(1) + &sum) + rat_int(10);
    Ok(DXi0 { value, cube_ratio_sup: sup, square_ratio_sum: sum, prefix_len: primes.len() })
}

/// `q = 6 p_(n-1)^2 + 1` and the range `[q^(5/4), a p_n]` of admissible `k`.
fn k_range(sys: &RankOneSystem, n: usize, a: f64) -> Result<(u64, f64, f64)> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let q = sys.stage(n - 1)?.q() as u64;
    let p = sys.stage(n)?.p;
    Ok((q, (q as f64).powf(1.25), a * p as f64))
}

/// Integers in `[q^(5/4), a p_n]`.
pub fn admissible_k(sys: &RankOneSystem, n: usize, a: f64) -> Result<std::ops::RangeInclusive<u64>> {
    let (_, lo, hi) = k_range(sys, n, a)?;
    Ok(lo.ceil() as u64..=hi.floor() as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fact59Row {
    pub k: u64,
    pub l: u64,
    pub mu_b: CertifiedValue,
    /// Certified upper end of `k mu(B) + 1`.
    pub lhs_upper: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fact59Report {
    pub n: usize,
    pub d_xi0: f64,
    pub range: (u64, u64),
    pub rows: Vec<Fact59Row>,
    pub normalization: Normalization,
    pub all_hold: bool,
}

/// `mu(B)` for `B` the top `p_n - l q` levels of the height-`p_n^2` tower
/// before the final cut, together with everything outside `[0, x_n)`.
/// Returns `l` and the certified measure.
pub fn fact59_measure(sys: &RankOneSystem, k: u64, n: usize) -> Result<(u64, CertifiedValue, Normalization)> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let st = sys.stage(n)?.clone();
    let q = sys.stage(n - 1)?.q() as u64;
    let kq = st.k * q;
    if k > kq {
        return Err(Error::Precondition(format!("k = {k} exceeds k_n q = {kq}")));
    }
    let l = (kq - k) / q;
    if l * q > st.p {
        return Err(Error::Precondition("l q exceeds p_n".into()));
    }
    // levels of the height-p^2 tower are two stage-n levels wide
    let band = rat_int(st.p - l * q) * rat_int(2) * &st.level_len;
    let (norm, kind) = sys.normalizer(n)?;
    let lo: Rational = (&band + &norm.lower - &st.x) / &norm.lower;
    let hi: Rational = (&band + &norm.upper - &st.x) / &norm.upper;
    Ok((l, CertifiedValue::new(enclose_f64(&lo).0, enclose_f64(&hi).1), kind))
}

/// `k mu(B) + 1 < d_xi0` for every integer `k` in `[q^(5/4), a p_n]`. An
/// empty range is reported with no rows.
pub fn fact59_check(sys: &RankOneSystem, n: usize, a: f64) -> Result<Fact59Report> {
    let d = d_xi0(sys.primes().primes())?.as_f64();
    let range = admissible_k(sys, n, a)?;
    let mut rows = Vec::new();
    let mut normalization = sys.normalizer(n)?.1;
    for k in range.clone() {
        let (l, mu_b, kind) = fact59_measure(sys, k, n)?;
        normalization = kind;
        let lhs_upper = (k as f64 * mu_b.upper + 1.0) * (1.0 + 1e-15);
        rows.push(Fact59Row { k, l, mu_b, lhs_upper, holds: lhs_upper < d.lower });
    }
    let all_hold = rows.iter().all(|r| r.holds);
    Ok(Fact59Report { n, d_xi0: d.midpoint(), range: (*range.start(), *range.end()), rows, normalization, all_hold })
}

/// Hypotheses of the upper bound at a given `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma58Conditions {
    /// `mu(tower_n) > 1/2`, certified.
    pub tower_majority: bool,
    /// `a p_n > q^(5/4)`.
    pub range_nonempty: bool,
    /// `2 / q^(1/4) < eps`.
    pub eps_large: bool,
    /// `q / p_n < a`.
    pub q_small: bool,
}

impl Lemma58Conditions {
    pub fn all(&self) -> bool {
        self.tower_majority && self.range_nonempty && self.eps_large && self.q_small
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma58Bound {
    pub n: usize,
    pub k: u64,
    pub m1: u32,
    pub m2: u32,
    pub d_xi0: f64,
    /// Certified upper end of the bound.
    pub value: f64,
    pub in_range: bool,
    pub conditions: Lemma58Conditions,
}

pub fn lemma58_conditions(sys: &RankOneSystem, n: usize, eps: f64, a: f64) -> Result<Lemma58Conditions> {
    let (q, lo, hi) = k_range(sys, n, a)?;
    let st = sys.stage(n)?;
    let (l, _) = sys.normalizer(n)?;
    Ok(Lemma58Conditions {
        tower_majority: &st.x / &l.upper > Rational::new(1.into(), 2.into()),
        range_nonempty: hi > lo,
        eps_large: 2.0 / (q as f64).powf(0.25) < eps,
        q_small: (q as f64) / (st.p as f64) < a,
    })
}

/// Evaluates the upper bound on `H(g, P_k)` for `E = [0, 1)` without
/// requiring `k` to be admissible; `in_range` and the conditions say whether
/// the bound is actually asserted at this `(k, n)`.
pub fn lemma58_bound_unchecked(sys: &RankOneSystem, k: u64, n: usize, eps: f64, a: f64, r: u32) -> Result<Lemma58Bound> {
    if !(eps > 0.0) || !(a > 0.0 && a < 0.25) || r == 0 {
        return Err(Error::Precondition("need eps > 0, 0 < a < 1/4 and r >= 1".into()));
    }
    let (_, lo, hi) = k_range(sys, n, a)?;
    let st = sys.stage(n)?;
    let prev = sys.stage(n - 1)?.p as f64;
    let six = 6.0 * prev * prev;
    let m1 = h_piece_index(six).expect("6 p^2 >= 2");
    let m2 = h_piece_index(12.0 * prev * prev + k as f64).expect("argument >= 2");
    let d = d_xi0(sys.primes().primes())?.as_f64();
    let e1 = 2f64.powi(-(m1 as i32));
    let e2 = 2f64.powi(-(m2 as i32));
    let kf = k as f64;
    let raw = r as f64 * (e1 * six.log2() + 2f64.powi(m1 as i32 + 1))
        + d.upper
        + 2.0
        + kf / st.p as f64 * (1.0 + eps) * (e2 * kf.log2() + e2 + 2f64.powi(m2 as i32 + 1));
    let value = CertifiedValue::point(raw).widen_rel(EVAL_REL_SLACK).upper;
    Ok(Lemma58Bound {
        n,
        k,
        m1,
        m2,
        d_xi0: d.midpoint(),
        value,
        in_range: kf >= lo && kf <= hi,
        conditions: lemma58_conditions(sys, n, eps, a)?,
    })
}

/// The bound for admissible `k` only.
pub fn lemma58_bound(sys: &RankOneSystem, k: u64, n: usize, eps: f64, a: f64, r: u32) -> Result<Lemma58Bound> {
    let b = lemma58_bound_unchecked(sys, k, n, eps, a, r)?;
    if !b.in_range {
        let (_, lo, hi) = k_range(sys, n, a)?;
        return Err(Error::Precondition(format!("k = {k} lies outside [{lo:.3}, {hi:.3}]")));
    }
    Ok(b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma58Verification {
    pub bound: Lemma58Bound,
    pub stage: usize,
    pub entropy: CertifiedValue,
    pub holds: bool,
}

/// Compares the computed `H(g, P_k)` for `E = [0, 1)` and the
/// piecewise-profile function against the bound.
pub fn lemma58_verify(sys: &RankOneSystem, k: u64, n: usize, eps: f64, a: f64, r: u32, budget_bits: u64) -> Result<Lemma58Verification> {
    let bound = lemma58_bound_unchecked(sys, k, n, eps, a, r)?;
    let stage = default_stage(sys, k as usize)?;
    let names = name_measures_symbolic(sys, stage, &AlignedSet::unit(), k as usize, budget_bits)?;
    let entropy = names_entropy(&EntropyFunction::gir(), &names);
    let holds = entropy.upper <= bound.value;
    Ok(Lemma58Verification { bound, stage, entropy, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank_one::PrimeSeq;
    use crate::scalar::to_f64;

    fn sys(ps: &[u64]) -> RankOneSystem {
        RankOneSystem::build(PrimeSeq::new(ps.to_vec()).unwrap(), ps.len()).unwrap()
    }

    #[test]
    fn d_values() {
        let d = d_xi0(&[2, 29]).unwrap();
        assert_eq!(d.value, Rational::new(3498.into(), 841.into()) + rat_int(10));
        assert!((to_f64(&d.value) - 14.159334126040428).abs() < 1e-12);
        assert!(d_xi0(&[2]).is_err());
    }

    #[test]
    fn empty_fact59_range() {
        let s = sys(&[2, 29, 5051]);
        let rep = fact59_check(&s, 1, 0.24).unwrap();
        assert!(rep.rows.is_empty());
        assert!(rep.range.0 > rep.range.1);
    }

    #[test]
    fn fact59_measure_is_small_band() {
        let s = sys(&[2, 29, 5051]);
        // stage 2: q = 5047, k_2 = 1, so only k <= q is meaningful
        let (l, mu_b, _) = fact59_measure(&s, 100, 2).unwrap();
        assert_eq!(l, 0);
        assert!(mu_b.lower > 0.0 && mu_b.upper < 1.0);
    }

    #[test]
    fn bound_pieces_and_slope() {
        let s = sys(&[2, 29, 5051]);
        let b = lemma58_bound_unchecked(&s, 1682, 2, 0.5, 0.2, 2).unwrap();
        assert_eq!(b.m1, 1);
        assert!(!b.in_range);
        assert!(lemma58_bound(&s, 1682, 2, 0.5, 0.2, 2).is_err());
        let vals: Vec<f64> =
            [100u64, 200, 400, 800].iter().map(|&k| lemma58_bound_unchecked(&s, k, 2, 0.5, 0.2, 2).unwrap().value).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(h_piece_index(24.0), Some(1));
    }

    #[test]
    fn verify_at_stage_two() {
        let s = sys(&[2, 29, 5051]);
        let v = lemma58_verify(&s, 1682, 2, 0.5, 0.2, 2, 1 << 30).unwrap();
        assert_eq!(v.stage, 2);
        assert!(v.holds, "{v:?}");
    }
}
