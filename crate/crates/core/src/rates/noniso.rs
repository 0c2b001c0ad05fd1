use serde::{Deserialize, Serialize};

use super::sequence::{Reindexer, SequenceSpec};
use crate::entropy::HFunction;
use crate::error::{Error, Result};
use crate::rank_one::PrimeSeq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CriterionSatisfiedOnRange,
    NotSatisfied,
    InsufficientData,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::CriterionSatisfiedOnRange => "criterion-satisfied-on-range",
            Verdict::NotSatisfied => "not-satisfied",
            Verdict::InsufficientData => "insufficient-data",
        }
    }
}

/// Ratio at a breakpoint of either step sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub n: f64,
    pub numerator_index: usize,
    pub denominator_index: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonisoReport {
    pub a: f64,
    pub b: f64,
    pub r: u32,
    /// `p_(n-1)^3 / p_n` along the first sequence.
    pub cube_ratios: Vec<f64>,
    /// `p_n < p_(n-1)^(2r)` for each consecutive pair of the first sequence.
    pub growth_condition: Vec<bool>,
    /// Window `[start, end)` on which both step sequences are determined.
    pub window: Option<(f64, f64)>,
    pub points: Vec<RatioPoint>,
    pub window_inf: Option<f64>,
    pub target: f64,
    pub verdict: Verdict,
    pub note: String,
}

/// Strict lower bound on the next term of a valid sequence: `p_(N+1) > 6 p_N^2 + 1`.
fn next_term_floor(p: u64) -> f64 {
    6.0 * (p as f64) * (p as f64) + 1.0
}

/// Finite-range evidence for the criterion
/// `liminf a xi_0(h(log2 n)) / zeta(h(log2 n)) < b / (2r)` with thresholds
/// `a p_k` and `2 q_m^2`. The ratio is a step function, so its infimum over
/// the window is attained at a breakpoint. Beyond the last known term of
/// either sequence the window is cut at the smallest possible next threshold.
pub fn nonisomorphism_report(xi0: &PrimeSeq, xi: &PrimeSeq, a: f64, b: f64, r: u32, n_range: Option<(f64, f64)>) -> Result<NonisoReport> {
    if !(a > 0.0 && b > 0.0) || !(a + b < 0.25) {
        return Err(Error::Precondition(format!("need a, b > 0 and a + b < 1/4, got a = {a}, b = {b}")));
    }
    if r == 0 {
        return Err(Error::Precondition("r must be a positive integer".into()));
    }
    let ps = xi0.primes();
    let cube_ratios = ps.windows(2).map(|w| (w[0] as f64).powi(3) / w[1] as f64).collect();
    let growth_condition = ps.windows(2).map(|w| (w[1] as f64).ln() < 2.0 * r as f64 * (w[0] as f64).ln()).collect();
    let target = b / (2.0 * r as f64);
    let h = SequenceSpec::HofLog2N(HFunction::Ir);
    let num = Reindexer::scaled_primes(a, ps).ok();
    let den = Reindexer::two_squared(xi.primes())?;
    let mut report = NonisoReport {
        a,
        b,
        r,
        cube_ratios,
        growth_condition,
        window: None,
        points: Vec::new(),
        window_inf: None,
        target,
        verdict: Verdict::InsufficientData,
        note: String::new(),
    };
    let Some(num) = num else {
        report.note = "no threshold a p_k reaches 1".into();
        return Ok(report);
    };
    let mut start = num.thresholds()[0].max(den.thresholds()[0]);
    let mut end = (a * next_term_floor(*ps.last().unwrap())).min(2.0 * next_term_floor(*xi.primes().last().unwrap()).powi(2));
    if let Some((lo, hi)) = n_range {
        start = start.max(lo);
        end = end.min(hi);
    }
    if !(start < end) {
        report.note = "the determined window is empty".into();
        return Ok(report);
    }
    report.window = Some((start, end));
    let mut breaks: Vec<f64> = num.thresholds().iter().chain(den.thresholds()).copied().filter(|&t| t > start && t < end).collect();
    breaks.push(start);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    for n in breaks {
        let i = num.index_at(n)?;
        let j = den.index_at(n)?;
        let top = h.eval_real(num.thresholds()[i])?;
        let bottom = h.eval_real(den.thresholds()[j])?;
        report.points.push(RatioPoint { n, numerator_index: i, denominator_index: j, ratio: top / bottom });
    }
    let inf = report.points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    report.window_inf = Some(inf);
    report.verdict = if inf < target { Verdict::CriterionSatisfiedOnRange } else { Verdict::NotSatisfied };
    report.note = format!("window [{start:.6e}, {end:.6e}) only; the criterion is a lower limit and is not decided by finite data");
    Ok(report)
}

/// Searches short first sequences `(p_0, p_1, p_2)` against a fixed `xi`
/// for one whose finite-range ratio falls below `b / (2r)`. The scale `a` is
/// set just above `1 / p_1`, so the first numerator threshold sits near one
/// where the profile is small. Only sequences meeting `p_n < p_(n-1)^(2r)`
/// at every known pair are tried. Returns the sequence, `a` and its report.
pub fn search_noniso_witness(xi: &PrimeSeq, b: f64, r: u32, max_p0: u64) -> Result<Option<(PrimeSeq, f64, NonisoReport)>> {
    for p0 in (2..=max_p0).filter(|&p| crate::rank_one::is_prime(p)) {
        let mut p1 = crate::rank_one::next_prime(6 * p0 * p0 + 2).expect("small");
        for _ in 0..8 {
            let a = 1.001 / p1 as f64;
            let limit = (p1 as f64).powi(2 * r as i32);
            // largest growth allowed by the condition p_2 < p_1^(2r), kept in range
            let mut p2_guess = (limit.min(1e15) * 0.999) as u64;
            let p2 = loop {
                match crate::rank_one::next_prime(p2_guess) {
                    Some(p) if (p as f64) < limit => break Some(p),
                    _ if p2_guess > 6 * p1 * p1 + 2 => p2_guess = p2_guess * 9 / 10,
                    _ => break None,
                }
            };
            if let Some(p2) = p2.filter(|&p| p > 6 * p1 * p1 + 1) {
                if a + b < 0.25 && ((p1 as f64).ln() < 2.0 * r as f64 * (p0 as f64).ln()) {
                    let xi0 = PrimeSeq::new(vec![p0, p1, p2])?;
                    let rep = nonisomorphism_report(&xi0, xi, a, b, r, None)?;
                    if rep.verdict == Verdict::CriterionSatisfiedOnRange {
                        return Ok(Some((xi0, a, rep)));
                    }
                }
            }
            p1 = crate::rank_one::next_prime(p1 + 1).expect("small");
        }
    }
    Ok(None)
}
