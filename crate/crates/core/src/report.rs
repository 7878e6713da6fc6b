use serde::Serialize;

use crate::seqcore::{ComparisonPolicy, Mode, Scalar};

/// Outcome of evaluating two or more expressions that should coincide.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub mode: Mode,
    /// The evaluated sides, when the identity is pointwise.
    #[serde(serialize_with = "ser_scalars")]
    pub sides: Vec<Scalar>,
    /// Exact mode: all sides equal exactly. Approx mode: discrepancy within eps.
    pub holds: bool,
    /// Largest absolute pairwise difference, as f64.
    pub max_discrepancy: f64,
    /// First index where a sequence identity fails, if any.
    pub first_mismatch: Option<i64>,
}

fn ser_scalars<S: serde::Serializer>(v: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl IdentityReport {
    /// Compares all pairs of `sides`.
    pub fn from_sides(sides: Vec<Scalar>, policy: &ComparisonPolicy) -> Self {
        let mode = sides.first().map(Scalar::mode).unwrap_or(policy.mode);
        let mut max = 0.0f64;
        let mut all_equal = true;
        for i in 0..sides.len() {
            for j in i + 1..sides.len() {
                let d = &sides[i] - &sides[j];
                all_equal &= d.is_exact_zero();
                max = max.max(d.to_f64().abs());
            }
        }
        let holds = match mode {
            Mode::Exact => all_equal,
            Mode::Approx => max <= policy.eps,
        };
        IdentityReport { mode, sides, holds, max_discrepancy: max, first_mismatch: None }
    }
}
