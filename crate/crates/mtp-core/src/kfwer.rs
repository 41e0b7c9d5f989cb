//! Procedures controlling the k-familywise error rate, the probability of
//! making at least `k` false rejections.
//!
//! Two routes are implemented. The augmented procedures run the FWER test and
//! then grant up to `k - 1` extra rejections. The generalised procedure tests
//! against `w_i(I) * k * alpha` thresholds and, once at least `k` hypotheses
//! are rejected, re-tests the rest against the least favourable way of adding
//! back `k - 1` previously rejected hypotheses. The operative variant bounds
//! how many of those add-back subsets are examined.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;

use crate::config::{Delta, NMax, ProcedureConfig};
use crate::error::MtpError;
use crate::fwer::{fwer_test, passes, run_stage, SelectionRule};
use crate::pvalues::PValues;
use crate::subset::IndexSet;
use crate::trace::{RejectionStep, RejectionTrace, Stage};
use crate::weight::Weight;
use crate::weighting::Weighting;

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

fn delta_level(config: &ProcedureConfig) -> Option<&BigRational> {
    match &config.delta {
        Delta::Level(l) => Some(l),
        Delta::Unbounded => None,
    }
}

/// Augmented k-FWER control: the FWER test at `alpha`, then the sequential
/// test continued at level `delta` for at most `k - 1` extra rejections.
pub fn kfwer_augmented(
    weighting: &dyn Weighting,
    p: &PValues,
    config: &ProcedureConfig,
) -> Result<RejectionTrace, MtpError> {
    check_lengths(weighting, p)?;
    let mut trace = fwer_test(weighting, p, &config.alpha)?;
    run_stage(
        weighting,
        p,
        &mut trace,
        delta_level(config),
        Stage::Augmented,
        Some(config.k - 1),
        SelectionRule::MinRatio,
    );
    Ok(trace)
}

/// Adjusted-p augmented k-FWER control: rejects every hypothesis with
/// adjusted p-value at most `alpha`, then the `min(|I|, k - 1)` smallest
/// remaining adjusted p-values, ties broken by lowest index.
pub fn kfwer_augmented_adjusted(
    weighting: &dyn Weighting,
    p: &PValues,
    config: &ProcedureConfig,
) -> Result<RejectionTrace, MtpError> {
    check_lengths(weighting, p)?;
    let adjusted = crate::fwer::adjusted_pvalues(weighting, p)?;
    Ok(augment_by_adjusted(
        weighting,
        &adjusted,
        &config.alpha,
        |_base_rejections| config.k - 1,
    ))
}

/// Shared body of the adjusted augmented procedures: base rejections are
/// `{i : p_adj_i <= alpha}` and the budget for extra rejections is a function
/// of the base count.
pub(crate) fn augment_by_adjusted(
    weighting: &dyn Weighting,
    adjusted: &crate::trace::AdjustedPValues,
    alpha: &BigRational,
    budget: impl FnOnce(usize) -> usize,
) -> RejectionTrace {
    let m = weighting.num_hypotheses();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| adjusted.get(a).cmp(adjusted.get(b)).then(a.cmp(&b)));
    let mut trace = RejectionTrace::empty(m);
    let mut budget = Some(budget);
    let mut extra = 0usize;
    for i in order {
        let stage = if adjusted.get(i) <= alpha {
            Stage::Base
        } else {
            if let Some(f) = budget.take() {
                extra = f(trace.num_rejected());
            }
            if extra == 0 {
                break;
            }
            extra -= 1;
            Stage::Augmented
        };
        let weights = weighting.weights(trace.live);
        trace.push(RejectionStep {
            index: i,
            stage,
            threshold: Weight::rational(adjusted.get(i).clone()),
            live_weights: weights.as_ref().clone(),
        });
    }
    trace
}

/// Generalised k-FWER control. Unlike the augmented route, this can reject
/// far more than `k - 1` hypotheses beyond the FWER set, at the cost of
/// minimising thresholds over subsets of previous rejections.
pub fn kfwer_generalised(
    weighting: &dyn Weighting,
    p: &PValues,
    config: &ProcedureConfig,
) -> Result<RejectionTrace, MtpError> {
    subset_capped_test(weighting, p, config, NMax::Unbounded)
}

/// Operative k-FWER control: the generalised procedure with the add-back
/// subsets restricted to the `B` least significant previous rejections,
/// where `B` is the largest integer with `C(B, k - 1) <= n_max`. With
/// `n_max` unbounded this is exactly the generalised procedure; `n_max = 1`
/// is the streamlined variant using only the `k - 1` least significant.
pub fn kfwer_operative(
    weighting: &dyn Weighting,
    p: &PValues,
    config: &ProcedureConfig,
) -> Result<RejectionTrace, MtpError> {
    subset_capped_test(weighting, p, config, config.n_max)
}

/// Largest `B <= cap` with `C(B, pick) <= n_max`.
fn subset_budget(cap: usize, pick: usize, n_max: NMax) -> usize {
    let limit = match n_max {
        NMax::Unbounded => return cap,
        NMax::Bounded(l) => BigInt::from(l),
    };
    let mut b = pick;
    while b < cap && binomial(BigInt::from(b + 1), BigInt::from(pick)) <= limit {
        b += 1;
    }
    b.min(cap)
}

fn subset_capped_test(
    weighting: &dyn Weighting,
    p: &PValues,
    config: &ProcedureConfig,
    n_max: NMax,
) -> Result<RejectionTrace, MtpError> {
    check_lengths(weighting, p)?;
    let m = weighting.num_hypotheses();
    let k = config.k;
    let k_alpha = &config.alpha * BigRational::from_integer(BigInt::from(k));
    let mut trace = RejectionTrace::empty(m);

    // First round: reject against the shares of k*alpha under the full graph.
    let weights = weighting.weights(trace.live);
    let first: Vec<usize> = trace
        .live
        .iter()
        .filter(|&i| passes(p.get(i), &weights[i], &k_alpha))
        .collect();
    for &i in &first {
        trace.push(RejectionStep {
            index: i,
            stage: Stage::Base,
            threshold: &weights[i] * &Weight::rational(k_alpha.clone()),
            live_weights: weights.as_ref().clone(),
        });
    }
    if trace.num_rejected() < k {
        // Too few rejections for the subset rounds; freely top the total up
        // to k - 1 with the sequential test at level delta.
        let budget = (k - 1).saturating_sub(trace.num_rejected());
        run_stage(
            weighting,
            p,
            &mut trace,
            delta_level(config),
            Stage::SubProcedure,
            Some(budget),
            SelectionRule::MinRatio,
        );
        return Ok(trace);
    }

    // Later rounds: a live hypothesis falls if its p-value passes the
    // smallest share seen over all ways of adding back k - 1 previous
    // rejections.
    while !trace.live.is_empty() {
        let rejected_by_p = least_significant(&trace.rejected_indices(), p, n_max, k - 1);
        let mut round = Vec::new();
        for i in trace.live.iter() {
            let mut min_weight: Option<Weight> = None;
            for add_back in rejected_by_p.subsets_of_size(k - 1) {
                let w = &weighting.weights(trace.live.union(add_back))[i];
                if min_weight.as_ref().map_or(true, |best| w < best) {
                    min_weight = Some(w.clone());
                }
            }
            let w = min_weight.expect("at least k - 1 rejected hypotheses");
            if passes(p.get(i), &w, &k_alpha) {
                round.push((i, &w * &Weight::rational(k_alpha.clone())));
            }
        }
        if round.is_empty() {
            break;
        }
        let live_weights = weighting.weights(trace.live).as_ref().clone();
        for (i, threshold) in round {
            trace.push(RejectionStep {
                index: i,
                stage: Stage::Base,
                threshold,
                live_weights: live_weights.clone(),
            });
        }
    }
    Ok(trace)
}

/// The pool the add-back subsets are drawn from: under a bounded `n_max`,
/// the `B` rejected hypotheses with the largest p-values (ties broken by
/// index).
fn least_significant(rejected: &[usize], p: &PValues, n_max: NMax, pick: usize) -> IndexSet {
    let b = subset_budget(rejected.len(), pick, n_max);
    if b >= rejected.len() {
        return IndexSet::from_indices(rejected.iter().copied());
    }
    let mut by_p = rejected.to_vec();
    by_p.sort_by(|&x, &y| p.get(x).cmp(p.get(y)).then(x.cmp(&y)));
    IndexSet::from_indices(by_p[by_p.len() - b..].iter().copied())
}
