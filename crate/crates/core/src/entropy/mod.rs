//! Entropy functions: concave `g` on `[0,1]` with `g(0) = 0`.
//!
//! Every catalog member is written as `g(x) = x * H(-log2 x)` for an increasing
//! profile `H`; [`EntropyFunction::phi_log`] evaluates `H` directly, which keeps
//! quantities like `phi(2^-1000)` representable.

mod class;
mod h;
mod tabulated;

use std::f64::consts::LN_2;
use std::fmt;
use std::path::Path;

use num_traits::{Float, Zero};
use serde::{Deserialize, Serialize};

pub use class::{classify, classify_ratios, property_check, Classification, GClass, Property, PropertyReport};
pub use h::{h_piece_index, h_piece_index_int, ir_piece, HFunction};
pub use tabulated::Tabulated;

use crate::certified::CertifiedValue;
use crate::error::{Error, Result};
use crate::scalar::{dyadic_exponent, enclose_f64, rat_int, Outward, Rational};

/// Relative slack applied to every floating evaluation of `g` before it is
/// used as a certified bound.
pub const EVAL_REL_SLACK: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Kind {
    /// Shannon function `-x log2 x`.
    Eta,
    /// `x log_a(1 - log_a x)`.
    G0 {
        a: f64,
    },
    /// `x (-log_a x)^alpha`.
    GTilde {
        a: f64,
        alpha: f64,
    },
    /// `x * h(-log2 x)` with the piecewise-linear profile [`HFunction::Ir`].
    Gir,
    /// `x * h^(m+1)(-log2 x)` with `h(x) = log2(1 + x)`.
    Gm {
        m: u32,
    },
    Custom(Tabulated),
}

/// An evaluable entropy function with cached derived quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyFunction {
    kind: Kind,
    argmax: f64,
    max_value: f64,
}

impl EntropyFunction {
    pub fn new(kind: Kind) -> Result<Self> {
        match &kind {
            Kind::G0 { a } if !(*a > 1.0) => return Err(Error::Domain(format!("g0 needs a > 1, got {a}"))),
            Kind::GTilde { a, alpha } if !(*a > 1.0 && *alpha > 0.0 && *alpha < 1.0) => {
                return Err(Error::Domain(format!("gtilde needs a > 1 and alpha in (0,1), got a={a}, alpha={alpha}")))
            }
            _ => {}
        }
        let mut f = Self { kind, argmax: 0.0, max_value: 0.0 };
        let (x, v) = f.locate_max();
        f.argmax = x;
        f.max_value = v;
        Ok(f)
    }

    pub fn eta() -> Self {
        Self::new(Kind::Eta).unwrap()
    }

    pub fn g0(a: f64) -> Result<Self> {
        Self::new(Kind::G0 { a })
    }

    pub fn gtilde(a: f64, alpha: f64) -> Result<Self> {
        Self::new(Kind::GTilde { a, alpha })
    }

    pub fn gir() -> Self {
        Self::new(Kind::Gir).unwrap()
    }

    pub fn gm(m: u32) -> Self {
        Self::new(Kind::Gm { m }).unwrap()
    }

    pub fn custom(t: Tabulated) -> Self {
        Self::new(Kind::Custom(t)).unwrap()
    }

    /// Parses `eta`, `g0:a=2`, `gtilde:a=2,alpha=0.5`, `gir`, `gm:m=1`,
    /// `custom:file=path.csv`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
        let mut a = None;
        let mut alpha = None;
        let mut m = None;
        let mut file = None;
        for kv in args.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value in {spec:?}")))?;
            let num = || v.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {v:?} in {spec:?}")));
            match k.trim() {
                "a" => a = Some(num()?),
                "alpha" => alpha = Some(num()?),
                "m" => m = Some(v.parse::<u32>().map_err(|_| Error::Parse(format!("bad m {v:?}")))?),
                "file" => file = Some(v.to_string()),
                other => return Err(Error::Parse(format!("unknown parameter {other:?} in {spec:?}"))),
            }
        }
        match name.trim() {
            "eta" => Ok(Self::eta()),
            "g0" => Self::g0(a.unwrap_or(2.0)),
            "gtilde" => Self::gtilde(a.unwrap_or(2.0), alpha.unwrap_or(0.5)),
            "gir" => Ok(Self::gir()),
            "gm" => Ok(Self::gm(m.unwrap_or(0))),
            "custom" => {
                let file = file.ok_or_else(|| Error::Parse("custom needs file=...".into()))?;
                Ok(Self::custom(Tabulated::from_csv(Path::new(&file))?))
            }
            other => Err(Error::Parse(format!("unknown entropy function {other:?}"))),
        }
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// Canonical specifier string (inverse of [`parse`](Self::parse) for catalog members).
    pub fn descriptor(&self) -> String {
        match &self.kind {
            Kind::Eta => "eta".into(),
            Kind::G0 { a } => format!("g0:a={a}"),
            Kind::GTilde { a, alpha } => format!("gtilde:a={a},alpha={alpha}"),
            Kind::Gir => "gir".into(),
            Kind::Gm { m } => format!("gm:m={m}"),
            Kind::Custom(t) => format!("custom:points={}", t.points().len()),
        }
    }

    /// `g(x)` for `x` in `[0,1]`.
    pub fn eval<F: Float>(&self, x: F) -> Result<F> {
        if !(x >= F::zero() && x <= F::one()) {
            return Err(Error::Domain(format!("entropy function needs x in [0,1], got {:?}", x.to_f64())));
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked<F: Float>(&self, x: F) -> F {
        if x == F::zero() {
            return F::zero();
        }
        match &self.kind {
            Kind::Eta => -x * x.log2(),
            Kind::Custom(t) => F::from(t.eval_f64(x.to_f64().unwrap())).unwrap(),
            _ => {
                let y = -x.log2();
                x * self.phi_log(if y < F::zero() { F::zero() } else { y })
            }
        }
    }

    /// `phi(2^-y) = 2^y g(2^-y)` for `y >= 0`, computed without forming `2^-y`
    /// for catalog members.
    pub fn phi_log<F: Float>(&self, y: F) -> F {
        let ln2 = F::from(LN_2).unwrap();
        match &self.kind {
            Kind::Eta => y,
            Kind::G0 { a } if *a == 2.0 => (F::one() + y).log2(),
            Kind::G0 { a } => {
                let ln_a = F::from(a.ln()).unwrap();
                (y * ln2 / ln_a).ln_1p() / ln_a
            }
            Kind::GTilde { a, alpha } => {
                let c = ln2 / F::from(a.ln()).unwrap();
                (c * y).powf(F::from(*alpha).unwrap())
            }
            Kind::Gir => HFunction::Ir.eval_unchecked(y),
            Kind::Gm { m } => HFunction::LogIter(m + 1).eval_unchecked(y),
            Kind::Custom(t) => {
                let x = (-y.to_f64().unwrap()).exp2();
                let first = t.points()[1].0.clone();
                if x <= crate::scalar::to_f64(&first) || x == 0.0 {
                    F::from(t.initial_slope()).unwrap()
                } else {
                    F::from(t.eval_f64(x) / x).unwrap()
                }
            }
        }
    }

    /// `phi_g(x) = g(x) / x` on `(0, 1]`.
    pub fn phi_of<F: Float>(&self, x: F) -> Result<F> {
        if !(x > F::zero() && x <= F::one()) {
            return Err(Error::Domain(format!("phi needs x in (0,1], got {:?}", x.to_f64())));
        }
        Ok(match &self.kind {
            Kind::Custom(_) => self.eval_unchecked(x) / x,
            _ => self.phi_log(-x.log2()),
        })
    }

    /// Exact `g(x)` when it is rational: dyadic arguments for the Shannon
    /// function and the piecewise-profile function, any rational for tabulations.
    pub fn eval_exact(&self, x: &Rational) -> Result<Option<Rational>> {
        if x < &Rational::zero() || x > &rat_int(1) {
            return Err(Error::Domain(format!("entropy function needs x in [0,1], got {x}")));
        }
        if x.is_zero() {
            return Ok(Some(Rational::zero()));
        }
        if let Kind::Custom(t) = &self.kind {
            return Ok(Some(t.eval_exact(x)));
        }
        let Some(j) = dyadic_exponent(x) else { return Ok(None) };
        let y = rat_int(j);
        Ok(match &self.kind {
            Kind::Eta => Some(x * &y),
            Kind::Gir => HFunction::Ir.eval_exact(&y)?.map(|h| x * h),
            Kind::G0 { a } if *a == 2.0 => {
                let n = j as u64 + 1;
                n.is_power_of_two().then(|| x * rat_int(n.trailing_zeros()))
            }
            _ if j == 0 => Some(Rational::zero()),
            _ => None,
        })
    }

    /// Certified enclosure of `g` over `[lo, hi]`, using concavity: the
    /// minimum sits at an endpoint, the maximum at an endpoint or at the
    /// interior maximiser.
    pub fn range_on(&self, lo: f64, hi: f64) -> CertifiedValue {
        let lo = lo.max(0.0);
        let hi = hi.min(1.0);
        debug_assert!(lo <= hi);
        let a = self.eval_unchecked(lo);
        let b = self.eval_unchecked(hi);
        let mut upper = a.max(b);
        // interior maximiser known to ~1e-12; pad the test window accordingly
        if lo <= self.argmax + 1e-9 && hi >= self.argmax - 1e-9 {
            upper = upper.max(self.max_value);
        }
        let lower = a.min(b);
        CertifiedValue { lower, upper }.widen_rel(EVAL_REL_SLACK)
    }

    /// Certified `g(x)` at an exact rational, degenerate when `g(x)` is rational.
    pub fn certified_at(&self, x: &Rational) -> Result<CertifiedValue> {
        if let Some(v) = self.eval_exact(x)? {
            return Ok(CertifiedValue::from_rational(&v));
        }
        let (lo, hi) = enclose_f64(x);
        Ok(self.range_on(lo, hi))
    }

    /// Certified `g` over a certified argument.
    pub fn certified_on(&self, x: &CertifiedValue) -> CertifiedValue {
        self.range_on(x.lower, x.upper)
    }

    /// Certified `n * g(x)` where `x = 2^-y`, i.e. `n 2^-y phi_log(y)`, for
    /// arguments too small for `f64`.
    pub fn phi_log_certified(&self, y: f64) -> CertifiedValue {
        let v = self.phi_log(y);
        CertifiedValue { lower: v, upper: v }.widen_rel(EVAL_REL_SLACK)
    }

    /// Maximiser and maximum of `g` on `[0,1]`.
    pub fn argmax(&self) -> (f64, f64) {
        (self.argmax, self.max_value)
    }

    fn locate_max(&self) -> (f64, f64) {
        if let Kind::Custom(t) = &self.kind {
            return t.vertex_max();
        }
        // golden-section search; exact for concave g up to the bracket width
        let g = |x: f64| self.eval_unchecked(x);
        let (mut a, mut b) = (0.0f64, 1.0f64);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        let (mut gc, mut gd) = (g(c), g(d));
        for _ in 0..200 {
            if b - a < 1e-14 {
                break;
            }
            if gc >= gd {
                b = d;
                d = c;
                gd = gc;
                c = b - r * (b - a);
                gc = g(c);
            } else {
                a = c;
                c = d;
                gc = gd;
                d = a + r * (b - a);
                gd = g(d);
            }
        }
        let mut best = (0.5 * (a + b), g(0.5 * (a + b)));
        for x in [0.0, 1.0, a, b] {
            let v = g(x);
            if v > best.1 {
                best = (x, v);
            }
        }
        best
    }

    /// `max g - min g` over `[0,1]`; the minimum of a concave function with
    /// `g(0) = 0` is `min(0, g(1))`.
    pub fn d_max(&self) -> Result<f64> {
        if let Kind::Custom(t) = &self.kind {
            if !t.is_concave() {
                return Err(Error::NotConcave("d_max needs a concave tabulation".into()));
            }
        }
        let g1 = self.eval_unchecked(1.0);
        Ok(self.max_value - g1.min(0.0))
    }

    /// Left derivative `g'(1/2-)`.
    pub fn left_derivative_half(&self) -> f64 {
        let ln2 = LN_2;
        // g(x) = x H(y), y = -log2 x:  g'(x) = H(y) - H'(y) / ln 2, with the
        // left derivative in x matching the right derivative in y.
        let y = 1.0;
        let (hv, hd) = match &self.kind {
            Kind::Eta => (1.0, 1.0),
            Kind::G0 { a } => {
                let ln_a = a.ln();
                let c = ln2 / ln_a;
                ((c * y).ln_1p() / ln_a, c / ((1.0 + c * y) * ln_a))
            }
            Kind::GTilde { a, alpha } => {
                let c = ln2 / a.ln();
                ((c * y).powf(*alpha), alpha * c * (c * y).powf(alpha - 1.0))
            }
            Kind::Gir => (HFunction::Ir.eval_unchecked(y), HFunction::Ir.deriv_right(y)),
            Kind::Gm { m } => {
                let h = HFunction::LogIter(m + 1);
                (h.eval_unchecked(y), h.deriv_right(y))
            }
            Kind::Custom(_) => return self.left_derivative_numeric(0.5),
        };
        hv - hd / ln2
    }

    /// One-sided difference quotient with Richardson extrapolation.
    pub fn left_derivative_numeric(&self, x: f64) -> f64 {
        let g = |t: f64| self.eval_unchecked(t);
        let d = |h: f64| (g(x) - g(x - h)) / h;
        let mut h = 1e-3;
        let mut table = vec![d(h)];
        for i in 1..6 {
            h /= 2.0;
            let mut row = vec![d(h)];
            let mut p = 2.0;
            for j in 0..i {
                let prev: f64 = table[j];
                let cur = row[j];
                row.push(cur + (cur - prev) / (p - 1.0));
                p *= 2.0;
            }
            table = row;
        }
        *table.last().unwrap()
    }

    /// `N g(1/N) = phi(1/N)`: the largest entropy of any partition with `N` atoms.
    pub fn jensen_bound(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("jensen bound needs N >= 1".into()));
        }
        Ok(self.phi_log((n as f64).log2()))
    }

    /// Certified `phi(1/N)` for `N` given by its base-2 logarithm.
    pub fn jensen_bound_log2(&self, log2_n: f64) -> CertifiedValue {
        self.phi_log_certified(log2_n.max(0.0))
    }

    /// Upper bound on `sum g(m_i)` over at most `2^log2_r` nonnegative
    /// masses with total at most `mass`: by concavity the sum is at most
    /// `r g(mass / r) = mass * phi(mass / r)`, which grows with `r`.
    pub fn residual_upper(&self, mass: f64, log2_r: f64) -> f64 {
        if !(mass > 0.0) {
            return 0.0;
        }
        let mass = mass.min(1.0);
        let y = (log2_r.max(0.0) - mass.log2()).max(0.0);
        // past the maximiser r g(m / r) is no longer increasing in m, so cover
        // every smaller true mass by r * max g
        let v = if (-y).exp2() >= self.argmax { log2_r.max(0.0).exp2() * self.max_value } else { mass * self.phi_log(y) };
        (v + v.abs() * EVAL_REL_SLACK).round_up().max(0.0)
    }

    /// Lower bound on `sum g(m_i)` for masses with total at most `mass`
    /// (`g(x) >= x g(1)` on `[0,1]`).
    pub fn residual_lower(&self, mass: f64) -> f64 {
        let g1 = self.eval_unchecked(1.0);
        if g1 >= 0.0 {
            0.0
        } else {
            (g1 * mass.min(1.0)).round_down()
        }
    }
}

impl fmt::Display for EntropyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}
