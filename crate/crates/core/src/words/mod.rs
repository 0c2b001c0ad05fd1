//! Binary words: periods, factor counting, name measures and the staged
//! substitution words read off rank-one towers.

mod bitword;
mod factors;
mod names;
mod substitution;

pub use bitword::{period, period_of, BitWord};
pub use factors::{factor_multiset, factor_multiset_periodic, FactorCounts};
pub use names::NameMultiset;
pub use substitution::{SubstitutionStep, SubstitutionWord};
