//! Procedures controlling the tail probability of the false discovery
//! proportion, `P(V / max(R, 1) > gamma) <= alpha`, plus the induced false
//! discovery rate bounds. Setting `gamma = 0` recovers FWER control.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::config::{Delta, ProcedureConfig};
use crate::error::MtpError;
use crate::fwer::{adjusted_pvalues, fwer_test, run_stage, SelectionRule};
use crate::kfwer::{augment_by_adjusted, kfwer_generalised};
use crate::pvalues::PValues;
use crate::trace::{RejectionTrace, Stage};
use crate::weighting::Weighting;

/// False discovery rate bounds induced by FDP control at `(alpha, gamma)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdrBounds {
    /// Asymptotic bound `2 * alpha`.
    pub asymptotic: BigRational,
    /// Finite-sample bound `alpha * (1 - gamma) + gamma`.
    pub finite_sample: BigRational,
    /// True when the finite-sample bound is the smaller of the two, which
    /// happens exactly when `gamma < alpha / (1 - alpha)`.
    pub finite_sample_preferred: bool,
}

/// Both printed FDR bounds for FDP control at level `alpha` with proportion
/// bound `gamma`.
pub fn fdr_bounds(alpha: &BigRational, gamma: &BigRational) -> FdrBounds {
    let two = BigRational::from_integer(BigInt::from(2));
    let asymptotic = &two * alpha;
    let finite_sample = alpha * (BigRational::one() - gamma) + gamma;
    FdrBounds {
        finite_sample_preferred: finite_sample < asymptotic,
        asymptotic,
        finite_sample,
    }
}

/// Result of an FDP procedure: the trace, the augmentation budget `D`, the
/// sequence of `k_j` visited (generalised route only), and the FDR bounds.
#[derive(Debug, Clone)]
pub struct FdpResult {
    pub trace: RejectionTrace,
    pub d: usize,
    pub k_sequence: Vec<usize>,
    pub fdr_bounds: FdrBounds,
}

/// Largest integer `D` with `D / (D + r) <= gamma`, i.e.
/// `floor(gamma * r / (1 - gamma))`.
pub(crate) fn augmentation_budget(rejections: usize, gamma: &BigRational) -> usize {
    let r = BigRational::from_integer(BigInt::from(rejections));
    let d = (gamma * r / (BigRational::one() - gamma)).floor();
    usize::try_from(d.to_integer()).expect("budget fits in usize")
}

/// Augmented FDP control: the FWER test at `alpha` followed by up to `D`
/// extra rejections at level `delta`, where `D` is the largest integer
/// keeping the proportion `D / (D + |R|)` within `gamma`.
pub fn fdp_augmented(
    weighting: &dyn Weighting,
    p: &PValues,
    config: &ProcedureConfig,
) -> Result<FdpResult, MtpError> {
    let mut trace = fwer_test(weighting, p, &config.alpha)?;
    let d = augmentation_budget(trace.num_rejected(), &config.gamma);
    let level = match &config.delta {
        Delta::Level(l) => Some(l),
        Delta::Unbounded => None,
    };
    run_stage(
        weighting,
        p,
        &mut trace,
        level,
        Stage::Augmented,
        Some(d),
        SelectionRule::MinRatio,
    );
    Ok(FdpResult {
        trace,
        d,
        k_sequence: Vec::new(),
        fdr_bounds: fdr_bounds(&config.alpha, &config.gamma),
    })
}

/// Adjusted-p augmented FDP control: rejects every hypothesis with adjusted
/// p-value at most `alpha`, then the `min(|I|, D)` smallest remaining
/// adjusted p-values, ties broken by lowest index.
pub fn fdp_augmented_adjusted(
    weighting: &dyn Weighting,
    p: &PValues,
    config: &ProcedureConfig,
) -> Result<FdpResult, MtpError> {
    let adjusted = adjusted_pvalues(weighting, p)?;
    let mut d = 0;
    let trace = augment_by_adjusted(weighting, &adjusted, &config.alpha, |base| {
        d = augmentation_budget(base, &config.gamma);
        d
    });
    Ok(FdpResult {
        trace,
        d,
        k_sequence: Vec::new(),
        fdr_bounds: fdr_bounds(&config.alpha, &config.gamma),
    })
}

/// Generalised FDP control: runs the generalised k-FWER procedure for
/// `k_j = 1, 2, ...` and stops at the first `j` whose rejection count stays
/// below `k_j / gamma - 1`, returning that run's rejections. At `gamma = 0`
/// this stops after `k_1 = 1`, the FWER case. Control is asymptotic.
pub fn fdp_generalised(
    weighting: &dyn Weighting,
    p: &PValues,
    config: &ProcedureConfig,
) -> Result<FdpResult, MtpError> {
    let mut k_sequence = Vec::new();
    let mut k = 1;
    let (trace, d) = loop {
        k_sequence.push(k);
        let run = ProcedureConfig {
            k,
            ..config.clone()
        };
        let trace = kfwer_generalised(weighting, p, &run)?;
        let rejections = BigRational::from_integer(BigInt::from(trace.num_rejected()));
        let stop = config.gamma.is_zero() || {
            let cutoff =
                BigRational::from_integer(BigInt::from(k)) / &config.gamma - BigRational::one();
            rejections < cutoff
        };
        if stop {
            let d = augmentation_budget(trace.num_rejected(), &config.gamma);
            break (trace, d);
        }
        k += 1;
    };
    Ok(FdpResult {
        trace,
        d,
        k_sequence,
        fdr_bounds: fdr_bounds(&config.alpha, &config.gamma),
    })
}
