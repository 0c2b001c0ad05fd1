use serde::{Deserialize, Serialize};

use crate::certified::CertifiedValue;
use crate::entropy::{EntropyFunction, HFunction, EVAL_REL_SLACK};
use crate::error::{Error, Result};
use crate::orbit::EntropySeries;

/// Normalising sequences `(a_n)` for entropy growth rates.
#[derive(Clone, Debug, PartialEq)]
pub enum SequenceSpec {
    N,
    Log2N,
    /// `h(log2 n)`.
    HofLog2N(HFunction),
    /// `phi_g(2^-n)`.
    PhiOf2PowMinusN(EntropyFunction),
    /// `phi_g(1/n)`, the value of `g` on `n` equal atoms.
    PhiOfInverseN(EntropyFunction),
    /// Values `a_1, a_2, ...`; real arguments are floored.
    Custom(Vec<f64>),
}

impl SequenceSpec {
    /// `"n"`, `"log2n"`, `"hlog2n:hir"`, `"hlog2n:hlog"`, `"hlog2n:hlogiter:m=<m>"`,
    /// `"phi2pow:<g>"`, `"phiinv:<g>"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if let Some(rest) = s.strip_prefix("hlog2n:") {
            let h = match rest {
                "hir" => HFunction::Ir,
                "hlog" => HFunction::Log,
                _ => match rest.strip_prefix("hlogiter:m=").map(str::parse::<u32>) {
                    Some(Ok(m)) => HFunction::LogIter(m),
                    _ => return Err(Error::Parse(format!("unknown profile `{rest}`"))),
                },
            };
            return Ok(SequenceSpec::HofLog2N(h));
        }
        if let Some(rest) = s.strip_prefix("phi2pow:") {
            return Ok(SequenceSpec::PhiOf2PowMinusN(EntropyFunction::parse(rest)?));
        }
        if let Some(rest) = s.strip_prefix("phiinv:") {
            return Ok(SequenceSpec::PhiOfInverseN(EntropyFunction::parse(rest)?));
        }
        match s {
            "n" => Ok(SequenceSpec::N),
            "log2n" => Ok(SequenceSpec::Log2N),
            _ => Err(Error::Parse(format!("unknown sequence `{s}`"))),
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            SequenceSpec::N => "n".into(),
            SequenceSpec::Log2N => "log2n".into(),
            SequenceSpec::HofLog2N(h) => format!("hlog2n:{}", h.name()),
            SequenceSpec::PhiOf2PowMinusN(g) => format!("phi2pow:{}", g.descriptor()),
            SequenceSpec::PhiOfInverseN(g) => format!("phiinv:{}", g.descriptor()),
            SequenceSpec::Custom(v) => format!("custom:{}", v.len()),
        }
    }

    /// `a_n` for integer `n >= 1`.
    pub fn eval(&self, n: u64) -> Result<f64> {
        if n < 1 {
            return Err(Error::Domain("sequences are indexed from n = 1".into()));
        }
        self.eval_real(n as f64)
    }

    /// The sequence's defining formula at a real argument `x >= 1`.
    pub fn eval_real(&self, x: f64) -> Result<f64> {
        if !(x >= 1.0) {
            return Err(Error::Domain(format!("sequence argument must be >= 1, got {x}")));
        }
        Ok(match self {
            SequenceSpec::N => x,
            SequenceSpec::Log2N => x.log2(),
            SequenceSpec::HofLog2N(h) => h.eval(x.log2())?,
            SequenceSpec::PhiOf2PowMinusN(g) => g.phi_log(x),
            SequenceSpec::PhiOfInverseN(g) => g.phi_log(x.log2()),
            SequenceSpec::Custom(v) => {
                *v.get(x.floor() as usize - 1).ok_or_else(|| Error::Domain(format!("tabulated sequence has no entry {}", x.floor())))?
            }
        })
    }

    pub fn eval_certified(&self, n: u64) -> Result<CertifiedValue> {
        Ok(CertifiedValue::point(self.eval(n)?).widen_rel(EVAL_REL_SLACK))
    }

    /// Whether the sequence is strictly increasing on `[1, n_max]`.
    pub fn is_increasing_on(&self, n_max: u64) -> Result<bool> {
        let mut prev = self.eval(1)?;
        for n in 2..=n_max {
            let v = self.eval(n)?;
            if !(v > prev) {
                return Ok(false);
            }
            prev = v;
        }
        Ok(true)
    }

    /// Reported, not asserted: `a_n / n` is nonincreasing on the upper half of
    /// `[2, n_max]` and ends below one tenth of its value at 2.
    pub fn sublinear_flag(&self, n_max: u64) -> Result<bool> {
        let r = |n: u64| self.eval(n).map(|v| v / n as f64);
        let start = (n_max / 2).max(2);
        let mut prev = r(start)?;
        for n in start + 1..=n_max {
            let v = r(n)?;
            if v > prev {
                return Ok(false);
            }
            prev = v;
        }
        Ok(prev < 0.1 * r(2)?)
    }
}

/// Step reindexing `nu(a)(n) = a(n_k)` for `n_k <= n < n_(k+1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reindexer {
    thresholds: Vec<f64>,
}

impl Reindexer {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::Precondition("at least one threshold is required".into()));
        }
        if thresholds.iter().any(|t| !(t.is_finite() && *t >= 1.0)) {
            return Err(Error::Precondition("thresholds must be finite and >= 1".into()));
        }
        if thresholds.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("thresholds must be strictly increasing".into()));
        }
        Ok(Self { thresholds })
    }

    /// Thresholds `2 q^2` for the terms `q` of a prime sequence.
    pub fn two_squared(primes: &[u64]) -> Result<Self> {
        Self::new(primes.iter().map(|&q| 2.0 * (q as f64) * (q as f64)).collect())
    }

    /// Thresholds `a p_n`, keeping those at least one.
    pub fn scaled_primes(a: f64, primes: &[u64]) -> Result<Self> {
        Self::new(primes.iter().map(|&p| a * p as f64).filter(|&t| t >= 1.0).collect())
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Index of the largest threshold `<= n`.
    pub fn index_at(&self, n: f64) -> Result<usize> {
        let k = self.thresholds.partition_point(|&t| t <= n);
        if k == 0 {
            return Err(Error::Domain(format!("{n} is below the first threshold {}", self.thresholds[0])));
        }
        Ok(k - 1)
    }

    /// Whether `n` lies beyond the last threshold, where the step value is
    /// provisional because later thresholds are unknown.
    pub fn is_open_ended(&self, n: f64) -> bool {
        n >= *self.thresholds.last().unwrap()
    }

    pub fn reindex(&self, base: &SequenceSpec, n: f64) -> Result<f64> {
        base.eval_real(self.thresholds[self.index_at(n)?])
    }
}

struct Point<'a> {
    n: usize,
    h: &'a CertifiedValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub ratio: CertifiedValue,
    pub threshold_index: Option<usize>,
}

/// Certified ratios `H(g, P_n) / a_n` with window-relative extremes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub sequence: String,
    pub rows: Vec<RateRow>,
    pub window: Option<(usize, usize)>,
    /// Enclosures of the smallest and largest ratio on the window.
    pub empirical_inf: Option<CertifiedValue>,
    pub empirical_sup: Option<CertifiedValue>,
    /// Indices skipped because `a_n <= 0`.
    pub skipped: Vec<usize>,
    pub verdict: String,
}

/// `(n, H)` pairs of a computed series.
pub fn series_points(series: &EntropySeries) -> Vec<(usize, CertifiedValue)> {
    series.entries.iter().map(|e| (e.n, e.h.clone())).collect()
}

/// Ratios of `H(g, P_n)` against `a_n`, or against `nu(a)(n)` when a
/// reindexer is given. Indices below the first threshold are skipped.
pub fn rate_report(points: &[(usize, CertifiedValue)], a: &SequenceSpec, nu: Option<&Reindexer>) -> Result<RateReport> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (n_idx, h) in points {
        let e = Point { n: *n_idx, h };
        let n = e.n as f64;
        let (denom, idx) = match nu {
            Some(r) => match r.index_at(n) {
                Ok(k) => (a.eval_real(r.thresholds()[k])?, Some(k)),
                Err(_) => {
                    skipped.push(e.n);
                    continue;
                }
            },
            None if e.n >= 1 => (a.eval(e.n as u64)?, None),
            None => {
                skipped.push(e.n);
                continue;
            }
        };
        if !(denom > 0.0) {
            skipped.push(e.n);
            continue;
        }
        let d = CertifiedValue::point(denom).widen_rel(EVAL_REL_SLACK);
        rows.push(RateRow { n: e.n, ratio: e.h.div_positive(&d), threshold_index: idx });
    }
    let window = rows.first().map(|f| (f.n, rows.last().unwrap().n));
    let fold = |pick: fn(f64, f64) -> f64| {
        rows.iter().map(|r| r.ratio.clone()).reduce(|x, y| CertifiedValue::new(pick(x.lower, y.lower), pick(x.upper, y.upper)))
    };
    let empirical_inf = fold(f64::min);
    let empirical_sup = fold(f64::max);
    let verdict = match (window, &empirical_inf, &empirical_sup) {
        (Some((lo, hi)), Some(i), Some(s)) => format!(
            "on n in [{lo}, {hi}] only: inf ratio in [{:.6e}, {:.6e}], sup ratio in [{:.6e}, {:.6e}]; no limit is claimed",
            i.lower, i.upper, s.lower, s.upper
        ),
        _ => "no index in range".into(),
    };
    Ok(RateReport { sequence: a.descriptor(), rows, window, empirical_inf, empirical_sup, skipped, verdict })
}

/// For a nondecreasing series and a step reindexing, the ratio against
/// `nu(a)` on each bracket `[n_k, n_(k+1))` is at least its value at `n_k`.
/// Returns, per fully computed bracket, whether the certified data confirm it.
pub fn step_ratio_check(points: &[(usize, CertifiedValue)], a: &SequenceSpec, nu: &Reindexer) -> Result<Vec<(usize, bool)>> {
    let mut out = Vec::new();
    let th = nu.thresholds();
    for k in 0..th.len().saturating_sub(1) {
        let start = th[k].ceil() as usize;
        let end = th[k + 1].ceil() as usize;
        let in_bracket: Vec<_> = points.iter().map(|(n, h)| Point { n: *n, h }).filter(|e| e.n >= start && e.n < end).collect();
        let Some(first) = in_bracket.first() else { continue };
        if first.n != start || in_bracket.last().unwrap().n + 1 != end {
            continue;
        }
        let denom = a.eval_real(th[k])?;
        if !(denom > 0.0) {
            continue;
        }
        let base = first.h.lower / denom;
        let ok = in_bracket.iter().all(|e| e.h.upper / denom >= base);
        out.push((k, ok));
    }
    Ok(out)
}
