use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EntropyFunction;
use crate::error::{Error, Result};

/// Finite-sample verdict on the behaviour of `g(x) / eta(x)` as `x -> 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GClass {
    G00,
    G0Sh(f64),
    G0Inf,
    Unknown,
}

impl fmt::Display for GClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GClass::G00 => f.write_str("G00"),
            GClass::G0Sh(c) => write!(f, "G0Sh(C={c:.6})"),
            GClass::G0Inf => f.write_str("G0Inf"),
            GClass::Unknown => f.write_str("Unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: GClass,
    pub depth: u32,
    /// `r_j = g(2^-j) / eta(2^-j)` for `j = 1..=depth`.
    pub ratios: Vec<f64>,
}

impl Classification {
    pub fn last_ratio(&self) -> f64 {
        *self.ratios.last().unwrap()
    }
}

const LOW: f64 = 0.2;
const HIGH: f64 = 5.0;
const STABLE_TOL: f64 = 1e-3;
const TREND_WINDOW: usize = 10;

/// Samples `r_j = phi(2^-j) / j` up to `depth` and applies the threshold rules.
pub fn classify(f: &EntropyFunction, depth: u32) -> Result<Classification> {
    if depth < 8 {
        return Err(Error::Precondition(format!("classification depth must be >= 8, got {depth}")));
    }
    let ratios: Vec<f64> = (1..=depth).map(|j| f.phi_log(j as f64) / j as f64).collect();
    Ok(Classification { class: classify_ratios(&ratios), depth, ratios })
}

pub fn classify_ratios(r: &[f64]) -> GClass {
    let n = r.len();
    if n < 2 {
        return GClass::Unknown;
    }
    let tail = &r[n.saturating_sub(TREND_WINDOW)..];
    let last = r[n - 1];
    let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    let increasing = tail.windows(2).all(|w| w[1] > w[0]);
    if last < LOW && decreasing {
        GClass::G00
    } else if last > HIGH && increasing {
        GClass::G0Inf
    } else if (last - r[n - 2]).abs() < STABLE_TOL {
        GClass::G0Sh(last)
    } else {
        GClass::Unknown
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    Subadditive,
    Subderivative,
    Concave,
    PhiDecreasing,
}

impl Property {
    pub const ALL: [Property; 4] = [Property::Subadditive, Property::Subderivative, Property::Concave, Property::PhiDecreasing];

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "subadditive" => Ok(Property::Subadditive),
            "subderivative" => Ok(Property::Subderivative),
            "concave" => Ok(Property::Concave),
            "phidecreasing" | "phi-decreasing" => Ok(Property::PhiDecreasing),
            _ => Err(Error::Parse(format!("unknown property {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub samples: u64,
    pub seed: u64,
    pub pass: bool,
    /// Sample point `(x, y, lambda)` and the amount by which the inequality failed.
    pub counterexample: Option<([f64; 3], f64)>,
}

const PROP_TOL: f64 = 1e-12;

/// Randomised check of a structural inequality; stops at the first violation.
pub fn property_check(f: &EntropyFunction, property: Property, samples: u64, seed: u64) -> Result<PropertyReport> {
    if samples < 100 {
        return Err(Error::Precondition(format!("property check needs >= 100 samples, got {samples}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = |x: f64| f.eval(x.clamp(0.0, 1.0)).unwrap();
    let mut counterexample = None;
    for _ in 0..samples {
        let x: f64 = rng.gen();
        let y: f64 = rng.gen();
        let l: f64 = rng.gen();
        // violation > 0 means the inequality fails
        let (lhs, rhs) = match property {
            Property::Subadditive => {
                let (x, y) = (x / 2.0, y / 2.0);
                (g(x + y), g(x) + g(y))
            }
            Property::Subderivative => (g(x * y), x * g(y) + y * g(x)),
            Property::Concave => (l * g(x) + (1.0 - l) * g(y), g(l * x + (1.0 - l) * y)),
            Property::PhiDecreasing => {
                let (a, b) = if x < y { (x, y) } else { (y, x) };
                if a == 0.0 {
                    continue;
                }
                (f.phi_of(b).unwrap(), f.phi_of(a).unwrap())
            }
        };
        let excess = lhs - rhs;
        if excess > PROP_TOL * (1.0 + lhs.abs().max(rhs.abs())) {
            counterexample = Some(([x, y, l], excess));
            break;
        }
    }
    Ok(PropertyReport { property, samples, seed, pass: counterexample.is_none(), counterexample })
}
