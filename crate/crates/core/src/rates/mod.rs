//! Growth-rate analysis: normalising sequences, step reindexing, finite-stage
//! checks of the lower and upper entropy bounds, and the non-isomorphism
//! criterion for pairs of prime sequences.

mod integral;
mod lemma58;
mod noniso;
mod sequence;
mod theorem54;

pub use integral::{integral_diagnostic, IntegralDiagnostic};
pub use lemma58::{
    admissible_k, d_xi0, fact59_check, fact59_measure, lemma58_bound, lemma58_bound_unchecked, lemma58_conditions, lemma58_verify, DXi0,
    Fact59Report, Fact59Row, Lemma58Bound, Lemma58Conditions, Lemma58Verification,
};
pub use noniso::{nonisomorphism_report, search_noniso_witness, NonisoReport, RatioPoint, Verdict};
pub use sequence::{rate_report, series_points, step_ratio_check, RateReport, RateRow, Reindexer, SequenceSpec};
pub use theorem54::{
    lambda_e, lambda_e_certified, measure_of, period_profile, theorem54_check, theorem54_stage, PeriodProfile, Theorem54Report,
};
