//! Entropy of the join partitions `P_n = P ∨ T^-1 P ∨ ... ∨ T^-(n-1) P` for
//! rank-one systems (geometric and symbolic paths) and reference subshifts.

mod geometric;
mod subshift;
mod symbolic;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use geometric::{geometric_names, join_sequence_geometric, JoinStep};
pub use subshift::{profile_mass, subshift_entropy, SubshiftSpec};
pub use symbolic::{default_stage, name_measures_symbolic, symbolic_counts};

use crate::certified::CertifiedValue;
use crate::entropy::EntropyFunction;
use crate::error::Result;
use crate::rank_one::{AlignedSet, Normalization, RankOneSystem};
use crate::words::NameMultiset;

/// Certified `sum g(mu(A))` over the atoms of a partition known only through
/// certified atom masses and an unassigned residual mass.
///
/// The residual may be spread over at most `2^log2_unseen` further atoms or
/// merged into listed ones. Upper: subadditivity moves all residual into
/// separate atoms, and concavity bounds those by `r g(m / r)`. Lower: each
/// true atom mass lies between its listed lower mass and its upper mass plus
/// the residual, and residual-only atoms contribute at least `m g(1)`.
pub fn entropy_bounds<'a>(
    g: &EntropyFunction,
    atoms: impl Iterator<Item = &'a CertifiedValue>,
    residual: &CertifiedValue,
    log2_unseen: f64,
) -> CertifiedValue {
    let m = residual.upper.max(0.0);
    let mut acc = CertifiedValue::zero();
    for a in atoms {
        let upper = g.range_on(a.lower, a.upper).upper;
        let lower = if m > 0.0 { g.range_on(a.lower, (a.upper + m).min(1.0)).lower } else { g.range_on(a.lower, a.upper).lower };
        acc = &acc + &CertifiedValue::new(lower, upper);
    }
    let tail = CertifiedValue::new(g.residual_lower(m), g.residual_upper(m, log2_unseen));
    &acc + &tail
}

/// `log2(2^k - seen)`, the number of names of length `k` not yet listed.
pub fn log2_unseen(k: usize, seen: usize) -> f64 {
    if k < 60 {
        (((1u64 << k) - (seen as u64).min(1u64 << k)).max(1) as f64).log2()
    } else {
        k as f64
    }
}

/// Certified `H(g, P_k)` from a name multiset.
pub fn names_entropy(g: &EntropyFunction, names: &NameMultiset) -> CertifiedValue {
    entropy_bounds(g, names.entries.values(), &names.residual, log2_unseen(names.k, names.entries.len()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Symbolic,
    Geometric,
    Cylinder,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Symbolic => "symbolic",
            Method::Geometric => "geometric",
            Method::Cylinder => "cylinder",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub n: usize,
    pub h: CertifiedValue,
    pub residual_upper: f64,
    pub atoms: usize,
    /// Largest certified atom measure (upper end), a diagnostic for `max mu(A) -> 0`.
    pub max_atom: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub system: String,
    pub e: String,
    pub g: String,
    pub method: Method,
    pub stage: Option<usize>,
    pub normalization: Normalization,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropySeries {
    pub meta: SeriesMeta,
    pub entries: Vec<SeriesEntry>,
}

impl EntropySeries {
    /// Whether consecutive values can be nondecreasing given their certified widths.
    pub fn is_monotone_within_slack(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].h.upper >= w[0].h.lower)
    }
}

fn entry_from_names(g: &EntropyFunction, names: &NameMultiset) -> SeriesEntry {
    SeriesEntry {
        n: names.k,
        h: names_entropy(g, names),
        residual_upper: names.residual.upper,
        atoms: names.entries.len(),
        max_atom: names.entries.values().map(|m| m.upper).fold(0.0, f64::max),
    }
}

/// `H(g, P_k)` for each `k` in `ks` through factor counting of the base word.
/// With `stage = None` each `k` uses [`default_stage`]. Evaluated in parallel;
/// the output order follows `ks`.
pub fn entropy_series_symbolic(
    sys: &RankOneSystem,
    g: &EntropyFunction,
    e: &AlignedSet,
    ks: &[usize],
    stage: Option<usize>,
    budget_bits: u64,
) -> Result<EntropySeries> {
    let entries = ks
        .par_iter()
        .map(|&k| {
            let m = match stage {
                Some(m) => m,
                None => default_stage(sys, k)?,
            };
            let names = name_measures_symbolic(sys, m, e, k, budget_bits)?;
            Ok(entry_from_names(g, &names))
        })
        .collect::<Result<Vec<_>>>()?;
    let norm_stage = stage.unwrap_or_else(|| ks.iter().map(|&k| default_stage(sys, k).unwrap_or(0)).max().unwrap_or(0));
    let meta = SeriesMeta {
        system: system_id(sys),
        e: e.to_string(),
        g: g.descriptor(),
        method: Method::Symbolic,
        stage,
        normalization: sys.normalizer(norm_stage)?.1,
    };
    Ok(EntropySeries { meta, entries })
}

/// Same quantities as [`entropy_series_symbolic`] via explicit interval joins
/// under the stage map (small stages only).
pub fn entropy_series_geometric(
    sys: &RankOneSystem,
    g: &EntropyFunction,
    e: &AlignedSet,
    n_max: usize,
    stage: usize,
    max_pieces: u128,
) -> Result<EntropySeries> {
    let set = sys.aligned_intervals(e)?;
    let steps = join_sequence_geometric(sys, &set, n_max, stage, max_pieces)?;
    let entries =
        steps.par_iter().map(|s| geometric_names(sys, stage, s).map(|names| entry_from_names(g, &names))).collect::<Result<Vec<_>>>()?;
    let meta = SeriesMeta {
        system: system_id(sys),
        e: e.to_string(),
        g: g.descriptor(),
        method: Method::Geometric,
        stage: Some(stage),
        normalization: sys.normalizer(stage)?.1,
    };
    Ok(EntropySeries { meta, entries })
}

pub fn system_id(sys: &RankOneSystem) -> String {
    let ps: Vec<String> = sys.primes().primes().iter().map(|p| p.to_string()).collect();
    format!("xi=({})", ps.join(","))
}
