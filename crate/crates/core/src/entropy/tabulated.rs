use std::path::Path;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, to_f64, Rational};

/// Piecewise-linear interpolant through `(x, g(x))` pairs covering `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tabulated {
    points: Vec<(Rational, Rational)>,
    #[serde(skip)]
    cache: Vec<(f64, f64)>,
    concave: bool,
}

impl Tabulated {
    /// Validates monotone `x`, coverage of `[0,1]`, `g(0) = 0` and concavity.
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self> {
        let t = Self::unchecked(points)?;
        if !t.concave {
            return Err(Error::NotConcave("slopes of the tabulation increase somewhere".into()));
        }
        Ok(t)
    }

    /// Accepts non-concave tables; only meant for diagnostics such as
    /// property checks that should report a counterexample.
    pub fn unchecked(mut points: Vec<(Rational, Rational)>) -> Result<Self> {
        if points.first().map(|p| !p.0.is_zero()).unwrap_or(true) {
            points.insert(0, (Rational::zero(), Rational::zero()));
        }
        if !points[0].1.is_zero() {
            return Err(Error::Domain("tabulated g must vanish at 0".into()));
        }
        if points.last().map(|p| p.0 != Rational::from_integer(1.into())).unwrap_or(true) {
            return Err(Error::Domain("tabulation must end at x = 1".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Domain("tabulated x values must be strictly increasing".into()));
        }
        let slopes: Vec<Rational> = points.windows(2).map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0)).collect();
        let concave = slopes.windows(2).all(|s| s[1] <= s[0]);
        let cache = points.iter().map(|(x, y)| (to_f64(x), to_f64(y))).collect();
        Ok(Self { points, cache, concave })
    }

    /// Reads `x,g` rows; `p/q`, integers and decimals are parsed exactly.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::new(parse_pairs(&text)?)
    }

    pub fn is_concave(&self) -> bool {
        self.concave
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    fn ensure_cache(&self) -> std::borrow::Cow<'_, [(f64, f64)]> {
        if self.cache.len() == self.points.len() {
            std::borrow::Cow::Borrowed(&self.cache)
        } else {
            std::borrow::Cow::Owned(self.points.iter().map(|(x, y)| (to_f64(x), to_f64(y))).collect())
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let pts = self.ensure_cache();
        let i = pts.partition_point(|p| p.0 <= x).clamp(1, pts.len() - 1);
        let (x0, y0) = pts[i - 1];
        let (x1, y1) = pts[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn eval_exact(&self, x: &Rational) -> Rational {
        let i = self.points.partition_point(|p| &p.0 <= x).clamp(1, self.points.len() - 1);
        let (x0, y0) = &self.points[i - 1];
        let (x1, y1) = &self.points[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Slope of the first segment, i.e. `g'(0+)`.
    pub fn initial_slope(&self) -> f64 {
        let pts = self.ensure_cache();
        (pts[1].1 - pts[0].1) / (pts[1].0 - pts[0].0)
    }

    pub fn vertex_max(&self) -> (f64, f64) {
        let pts = self.ensure_cache();
        pts.iter().copied().fold((0.0, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc })
    }

    pub fn has_negative_values(&self) -> bool {
        self.points.iter().any(|p| p.1.is_negative())
    }
}

pub(crate) fn parse_pairs(text: &str) -> Result<Vec<(Rational, Rational)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| Error::Parse(format!("line {}: expected `x,g`", lineno + 1)))?;
        match (parse_rational(a), parse_rational(b)) {
            (Ok(x), Ok(y)) => out.push((x, y)),
            // header row
            _ if out.is_empty() && lineno == 0 => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Ok(out)
}
