//! Exact interval geometry on the line and static entropy of partitions.

mod interval_set;
mod partition;
mod translation;

pub use interval_set::{IntervalSet, SetOp};
pub use partition::LabeledPartition;
pub use translation::{Direction, Mapped, PiecewiseTranslation};

use num_traits::{One, Zero};

use crate::certified::{CertifiedValue, ExactInterval};
use crate::entropy::EntropyFunction;
use crate::error::{Error, Result};
use crate::scalar::{enclose_f64, Rational};

/// Certified `g(m / L)` where the normaliser `L` is only known to lie in an interval.
pub fn certified_mass(g: &EntropyFunction, m: &Rational, normalizer: &ExactInterval) -> Result<CertifiedValue> {
    if !(normalizer.lower > Rational::zero()) {
        return Err(Error::Precondition("normalizer must be positive".into()));
    }
    if normalizer.is_point() {
        let x = m / &normalizer.lower;
        return g.certified_at(&x.min(Rational::one()));
    }
    let lo = enclose_f64(&(m / &normalizer.upper)).0;
    let hi = enclose_f64(&(m / &normalizer.lower)).1;
    Ok(g.range_on(lo, hi))
}

/// `sum g(mu(A) / L)` over atoms, summed in atom order.
pub fn static_entropy(g: &EntropyFunction, p: &LabeledPartition<Rational>, normalizer: &ExactInterval) -> Result<CertifiedValue> {
    mass_entropy(g, p.measures(), normalizer)
}

/// `sum g(mu(B ∩ F) / L)` over atoms.
pub fn restricted_entropy(
    g: &EntropyFunction,
    p: &LabeledPartition<Rational>,
    f: &IntervalSet<Rational>,
    normalizer: &ExactInterval,
) -> Result<CertifiedValue> {
    mass_entropy(g, p.atoms().iter().map(|(_, a)| a.intersect(f).measure()), normalizer)
}

pub fn mass_entropy(g: &EntropyFunction, masses: impl Iterator<Item = Rational>, normalizer: &ExactInterval) -> Result<CertifiedValue> {
    let mut acc = CertifiedValue::zero();
    for m in masses {
        acc = &acc + &certified_mass(g, &m, normalizer)?;
    }
    Ok(acc)
}

/// Exact static entropy when every term is rational, under an exact normaliser.
pub fn static_entropy_exact(g: &EntropyFunction, p: &LabeledPartition<Rational>, normalizer: &Rational) -> Result<Option<Rational>> {
    let mut acc = Rational::zero();
    for m in p.measures() {
        match g.eval_exact(&(m / normalizer))? {
            Some(v) => acc += v,
            None => return Ok(None),
        }
    }
    Ok(Some(acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn uniform(n: u32) -> LabeledPartition<Rational> {
        let k = 1i64 << n;
        let atoms = (0..k).map(|i| (i.to_string(), IntervalSet::interval(rat(i, k), rat(i + 1, k)).unwrap())).collect();
        LabeledPartition::new(atoms, (rat(0, 1), rat(1, 1))).unwrap()
    }

    #[test]
    fn examples() {
        let one = ExactInterval::point(rat(1, 1));
        let eta = EntropyFunction::eta();
        let half = uniform(1);
        let h = static_entropy(&eta, &half, &one).unwrap();
        assert!(h.contains(&1.0) && h.width() < 1e-15);
        for n in 0..8 {
            assert_eq!(static_entropy_exact(&eta, &uniform(n), &rat(1, 1)).unwrap(), Some(rat_int(n)));
            let g0 = EntropyFunction::g0(2.0).unwrap();
            let h = static_entropy(&g0, &uniform(n), &one).unwrap();
            let expect = ((1 + n) as f64).log2();
            assert!(h.lower <= expect + 1e-12 && expect - 1e-12 <= h.upper);
        }
        let f = IntervalSet::interval(rat(0, 1), rat(1, 2)).unwrap();
        let r = restricted_entropy(&eta, &half, &f, &one).unwrap();
        assert!(r.contains(&0.5));
        let empty = IntervalSet::empty();
        assert_eq!(restricted_entropy(&eta, &half, &empty, &one).unwrap().upper, 0.0);
        let amb = IntervalSet::interval(rat(0, 1), rat(1, 1)).unwrap();
        assert_eq!(restricted_entropy(&eta, &half, &amb, &one).unwrap(), h);
        assert!(static_entropy(&eta, &half, &ExactInterval::point(rat(0, 1))).is_err());
    }

    #[test]
    fn interval_normalizer_encloses_endpoints() {
        let eta = EntropyFunction::eta();
        let p = uniform(3);
        let wide = ExactInterval::new(rat(9, 10), rat(11, 10));
        let h = static_entropy(&eta, &p, &wide).unwrap();
        for l in [rat(9, 10), rat(1, 1), rat(11, 10)] {
            let x = crate::scalar::to_f64(&(rat(1, 8) / &l));
            let v = 8.0 * eta.eval(x).unwrap();
            assert!(h.lower <= v && v <= h.upper);
        }
    }
}
