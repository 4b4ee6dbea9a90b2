//! Instance checks of the proof chain, per-instance certificates, and
//! empirical searches for the optimal constant.

mod random;
mod search;
mod steps;

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::coeff_lq_norm;
use crate::poly::HomogeneousPolynomial;

pub use random::{derive_seed, random_polynomial, PolynomialKind};
pub use search::{
    classify_trend, exponent_probe, search_constant_lower_bound, ProbeReport, ProbeRow, RatioWitness,
    SearchParams, Trend, TREND_TOLERANCE,
};
pub use steps::{
    certify_theorem_instance, certify_with_norm, check_des1_step, check_expansion_step, check_holder_step,
    check_l2_step, check_polarization_step, holder_report, l2_step_report, polarization_step_report,
    verify_polynomial, Certificate, PreInterpolationCheck, StepId, StepReport, Tolerances, EXACT_TOLERANCE,
    EXPANSION_BUDGET, OPTIMIZER_TOLERANCE,
};

/// `(Σ_{α∈Λ_M} |c_α|^q)^{1/q}`.
pub fn lhs_bh(p: &HomogeneousPolynomial, max_vars: u32, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    coeff_lq_norm(p, q, Some(max_vars as usize))
}

/// Run parameters stamped on every emitted record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecordContext {
    pub seed: u64,
    pub budget: u64,
    /// `None` for runs that do not involve the constant chain.
    pub beta1: Option<f64>,
    pub tolerance: f64,
}

#[derive(Serialize)]
struct Record<'a, T> {
    run: &'a RecordContext,
    index: usize,
    #[serde(flatten)]
    body: &'a T,
}

/// One JSON object per line: the item's fields, its position and `context`
/// under `run`.
pub fn write_jsonl<'a, W, T, I>(out: &mut W, context: &RecordContext, items: I) -> Result<()>
where
    W: Write,
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    for (index, body) in items.into_iter().enumerate() {
        serde_json::to_writer(
            &mut *out,
            &Record {
                run: context,
                index,
                body,
            },
        )?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Per-step pass counts over a batch of reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepSummary {
    pub step: StepId,
    pub total: usize,
    pub passed: usize,
    /// `max lhs / rhs`; above one only for failed or tolerance-absorbed checks.
    pub worst_ratio: f64,
    pub min_slack: f64,
}

pub fn summarize_steps<'a, I: IntoIterator<Item = &'a StepReport>>(reports: I) -> Vec<StepSummary> {
    let mut by_step: BTreeMap<StepId, StepSummary> = BTreeMap::new();
    for r in reports {
        let s = by_step.entry(r.step).or_insert(StepSummary {
            step: r.step,
            total: 0,
            passed: 0,
            worst_ratio: 0.0,
            min_slack: f64::INFINITY,
        });
        s.total += 1;
        s.passed += usize::from(r.passed);
        if r.rhs > 0.0 {
            s.worst_ratio = s.worst_ratio.max(r.lhs / r.rhs);
        } else if r.lhs > 0.0 {
            s.worst_ratio = f64::INFINITY;
        }
        s.min_slack = s.min_slack.min(r.slack);
    }
    by_step.into_values().collect()
}

pub const SUMMARY_CSV_HEADER: [&str; 9] = [
    "step",
    "total",
    "passed",
    "worst_ratio",
    "min_slack",
    "seed",
    "budget",
    "beta1",
    "tolerance",
];

pub fn write_summary_csv<W: Write>(out: W, context: &RecordContext, rows: &[StepSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.step.as_str().to_string(),
            r.total.to_string(),
            r.passed.to_string(),
            r.worst_ratio.to_string(),
            r.min_slack.to_string(),
            context.seed.to_string(),
            context.budget.to_string(),
            context.beta1.map_or(String::new(), |b| b.to_string()),
            context.tolerance.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
