use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated values of `∫_1^X phi(x) / x^2 dx` at `X = 2^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralDiagnostic {
    /// `(log2 X, partial integral)`.
    pub partial: Vec<(u32, f64)>,
    /// `phi(X) / X` at the last truncation point, a lower bound on the
    /// remaining tail for increasing `phi`.
    pub tail_lower: f64,
    /// `"likely-finite"` or `"likely-infinite"`; a label for inputs, not a proof.
    pub label: String,
}

/// Simpson quadrature in `t = ln x` on each octave `[2^j, 2^(j+1))` up to
/// `2^max_log2`. The label is finite when the last octave contributes less
/// than `1e-3` of the total and contributions are shrinking.
pub fn integral_diagnostic(phi: impl Fn(f64) -> f64, max_log2: u32) -> Result<IntegralDiagnostic> {
    if !(4..=1000).contains(&max_log2) {
        return Err(Error::Precondition("truncation exponent must be in 4..=1000".into()));
    }
    let f = |t: f64| phi(t.exp()) * (-t).exp();
    let ln2 = std::f64::consts::LN_2;
    let steps = 64usize;
    let mut total = 0.0;
    let mut partial = Vec::with_capacity(max_log2 as usize);
    let mut pieces = Vec::with_capacity(max_log2 as usize);
    for j in 0..max_log2 {
        let (a, b) = (j as f64 * ln2, (j + 1) as f64 * ln2);
        let hstep = (b - a) / steps as f64;
        let mut s = f(a) + f(b);
        for i in 1..steps {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * hstep);
        }
        let piece = s * hstep / 3.0;
        pieces.push(piece);
        total += piece;
        partial.push((j + 1, total));
    }
    let x = 2f64.powi(max_log2 as i32);
    let tail_lower = phi(x) / x;
    let n = pieces.len();
    let shrinking = pieces[n - 1] <= pieces[n - 2] && pieces[n - 2] <= pieces[n - 3];
    let label = if shrinking && pieces[n - 1] < 1e-3 * total { "likely-finite" } else { "likely-infinite" };
    Ok(IntegralDiagnostic { partial, tail_lower, label: label.into() })
}
