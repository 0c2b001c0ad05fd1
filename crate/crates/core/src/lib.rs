//! Generalized measure-theoretic entropy of rank-one systems: entropy
//! functions, exact interval geometry, symbolic base words, and rate analysis.

pub mod certified;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod io;
pub mod orbit;
pub mod rank_one;
pub mod rates;
pub mod scalar;
pub mod words;

pub use certified::{Certified, CertifiedValue, ExactInterval};
pub use entropy::{EntropyFunction, GClass, Kind};
pub use error::{Error, Result};
pub use geometry::{IntervalSet, LabeledPartition, PiecewiseTranslation};
pub use rank_one::{PrimeSeq, RankOneSystem};
pub use scalar::{Outward, Rational, Scalar};
pub use words::{BitWord, NameMultiset};
