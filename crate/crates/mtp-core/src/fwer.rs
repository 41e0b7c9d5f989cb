//! The weighted sequential rejection procedure controlling the familywise
//! error rate, and its adjusted p-values.
//!
//! Each round compares every live p-value against its share `w_i(I) * alpha`
//! of the level. The hypothesis with the smallest ratio `p_i / w_i(I)` is
//! rejected if it passes, its weight is redistributed, and the round repeats.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::MtpError;
use crate::pvalues::PValues;
use crate::trace::{AdjustedPValues, RejectionStep, RejectionTrace, Stage};
use crate::weight::Weight;
use crate::weighting::Weighting;

/// How the next rejection is chosen among hypotheses passing the threshold.
/// The rejected set does not depend on the choice; tests exercise both rules
/// to check that.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    /// Smallest ratio `p_i / w_i(I)`, ties broken by lowest index.
    MinRatio,
    /// Lowest index among hypotheses passing the threshold.
    LowestIndex,
}

/// The ratio `p / w`, with a weight of zero limit and a positive p-value
/// giving an infinite ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Ratio {
    Finite(Weight),
    Infinite,
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ratio::Finite(a), Ratio::Finite(b)) => a.cmp(b),
            (Ratio::Finite(_), Ratio::Infinite) => Ordering::Less,
            (Ratio::Infinite, Ratio::Finite(_)) => Ordering::Greater,
            (Ratio::Infinite, Ratio::Infinite) => Ordering::Equal,
        }
    }
}

/// The ratio `p / w` under the lexicographic order. A zero p-value always
/// gives 0, matching the rejection rule: `p = 0` passes any nonnegative
/// threshold, including a zero weight.
pub(crate) fn ratio(p: &BigRational, w: &Weight) -> Ratio {
    if p.is_zero() {
        Ratio::Finite(Weight::zero())
    } else if !w.a().is_zero() {
        Ratio::Finite(&Weight::rational(p.clone()) / w)
    } else {
        Ratio::Infinite
    }
}

/// True if `p <= w * level` in the lexicographic sense.
pub(crate) fn passes(p: &BigRational, w: &Weight, level: &BigRational) -> bool {
    let threshold = w * &Weight::rational(level.clone());
    threshold.cmp_rational(p) != Ordering::Less
}

/// Runs one sequential rejection stage on `trace.live`, rejecting while a
/// live hypothesis passes `p_i <= w_i(I) * level` and the budget allows.
/// A `level` of `None` means every live hypothesis passes. Rejections are
/// appended to `trace` tagged with `stage`.
pub(crate) fn run_stage(
    weighting: &dyn Weighting,
    p: &PValues,
    trace: &mut RejectionTrace,
    level: Option<&BigRational>,
    stage: Stage,
    budget: Option<usize>,
    selection: SelectionRule,
) {
    let mut remaining = budget;
    while !trace.live.is_empty() && remaining != Some(0) {
        let weights = weighting.weights(trace.live);
        let chosen = match selection {
            SelectionRule::MinRatio => {
                let mut best: Option<(Ratio, usize)> = None;
                for i in trace.live.iter() {
                    let r = ratio(p.get(i), &weights[i]);
                    if best.as_ref().map_or(true, |(b, _)| r < *b) {
                        best = Some((r, i));
                    }
                }
                let (_, j) = best.expect("live set is nonempty");
                let ok = match level {
                    Some(l) => passes(p.get(j), &weights[j], l),
                    None => true,
                };
                ok.then_some(j)
            }
            SelectionRule::LowestIndex => trace.live.iter().find(|&i| match level {
                Some(l) => passes(p.get(i), &weights[i], l),
                None => true,
            }),
        };
        let Some(j) = chosen else { break };
        let threshold = match level {
            Some(l) => &weights[j] * &Weight::rational(l.clone()),
            None => Weight::one(),
        };
        trace.push(RejectionStep {
            index: j,
            stage,
            threshold,
            live_weights: weights.as_ref().clone(),
        });
        if let Some(n) = remaining.as_mut() {
            *n -= 1;
        }
    }
}

fn check_lengths(weighting: &dyn Weighting, p: &PValues) -> Result<(), MtpError> {
    if p.len() != weighting.num_hypotheses() {
        return Err(MtpError::Usage(format!(
            "got {} p-values for {} hypotheses",
            p.len(),
            weighting.num_hypotheses()
        )));
    }
    Ok(())
}

/// The sequential weighted test at level `alpha`, controlling the familywise
/// error rate strongly.
pub fn fwer_test(
    weighting: &dyn Weighting,
    p: &PValues,
    alpha: &BigRational,
) -> Result<RejectionTrace, MtpError> {
    fwer_test_with_selection(weighting, p, alpha, SelectionRule::MinRatio)
}

/// As [`fwer_test`], with an explicit selection rule. The rejected set is
/// invariant to the rule; only the order of the trace steps may differ.
pub fn fwer_test_with_selection(
    weighting: &dyn Weighting,
    p: &PValues,
    alpha: &BigRational,
    selection: SelectionRule,
) -> Result<RejectionTrace, MtpError> {
    check_lengths(weighting, p)?;
    let mut trace = RejectionTrace::empty(p.len());
    run_stage(weighting, p, &mut trace, Some(alpha), Stage::Base, None, selection);
    Ok(trace)
}

/// Adjusted p-values for the sequential test: the running maximum of the
/// smallest ratio `p_i / w_i(I)` over the removal sequence. A hypothesis is
/// rejected at level `alpha` exactly when its adjusted p-value is at most
/// `alpha`. Perturbation terms order the ratios but are dropped from the
/// reported values; results are capped at 1.
pub fn adjusted_pvalues(
    weighting: &dyn Weighting,
    p: &PValues,
) -> Result<AdjustedPValues, MtpError> {
    check_lengths(weighting, p)?;
    let mut adjusted = vec![BigRational::one(); p.len()];
    let mut trace = RejectionTrace::empty(p.len());
    let mut running_max = BigRational::zero();
    while !trace.live.is_empty() {
        let weights = weighting.weights(trace.live);
        let mut best: Option<(Ratio, usize)> = None;
        for i in trace.live.iter() {
            let r = ratio(p.get(i), &weights[i]);
            if best.as_ref().map_or(true, |(b, _)| r < *b) {
                best = Some((r, i));
            }
        }
        let (r, j) = best.expect("live set is nonempty");
        match r {
            Ratio::Finite(value) => {
                if value.a() > &running_max {
                    running_max = value.a().clone();
                }
                adjusted[j] = running_max.clone();
                trace.push(RejectionStep {
                    index: j,
                    stage: Stage::Base,
                    threshold: value,
                    live_weights: weights.as_ref().clone(),
                });
            }
            Ratio::Infinite => {
                // Nothing live can ever be rejected at any level.
                break;
            }
        }
    }
    Ok(AdjustedPValues::capped(adjusted))
}
