//! Uniform dispatch over the testing procedures, used by the simulation
//! harness and the command line.

use crate::config::ProcedureConfig;
use crate::error::MtpError;
use crate::fdp::{fdp_augmented, fdp_augmented_adjusted, fdp_generalised, FdrBounds};
use crate::fwer::fwer_test;
use crate::kfwer::{
    kfwer_augmented, kfwer_augmented_adjusted, kfwer_generalised, kfwer_operative,
};
use crate::pvalues::PValues;
use crate::trace::RejectionTrace;
use crate::weighting::Weighting;

/// The implemented procedures, named as on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcedureKind {
    Fwer,
    KfwerAugmented,
    KfwerAugmentedAdjusted,
    KfwerGeneralised,
    KfwerOperative,
    FdpAugmented,
    FdpAugmentedAdjusted,
    FdpGeneralised,
}

impl ProcedureKind {
    pub const ALL: [ProcedureKind; 8] = [
        ProcedureKind::Fwer,
        ProcedureKind::KfwerAugmented,
        ProcedureKind::KfwerAugmentedAdjusted,
        ProcedureKind::KfwerGeneralised,
        ProcedureKind::KfwerOperative,
        ProcedureKind::FdpAugmented,
        ProcedureKind::FdpAugmentedAdjusted,
        ProcedureKind::FdpGeneralised,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProcedureKind::Fwer => "fwer",
            ProcedureKind::KfwerAugmented => "kfwer-aug",
            ProcedureKind::KfwerAugmentedAdjusted => "kfwer-aug-adj",
            ProcedureKind::KfwerGeneralised => "kfwer-gen",
            ProcedureKind::KfwerOperative => "kfwer-operative",
            ProcedureKind::FdpAugmented => "fdp-aug",
            ProcedureKind::FdpAugmentedAdjusted => "fdp-aug-adj",
            ProcedureKind::FdpGeneralised => "fdp-gen",
        }
    }

    pub fn parse(name: &str) -> Result<Self, MtpError> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == name)
            .ok_or_else(|| MtpError::Usage(format!("unknown procedure '{name}'")))
    }

    /// True for the procedures whose proportion bound `gamma` is read.
    pub fn is_fdp(self) -> bool {
        matches!(
            self,
            ProcedureKind::FdpAugmented
                | ProcedureKind::FdpAugmentedAdjusted
                | ProcedureKind::FdpGeneralised
        )
    }
}

impl std::fmt::Display for ProcedureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// FDP-specific outputs carried alongside the trace.
#[derive(Debug, Clone)]
pub struct FdpInfo {
    pub d: usize,
    pub k_sequence: Vec<usize>,
    pub fdr_bounds: FdrBounds,
}

/// Outcome of a dispatched procedure run.
#[derive(Debug, Clone)]
pub struct ProcedureRun {
    pub kind: ProcedureKind,
    pub trace: RejectionTrace,
    pub fdp: Option<FdpInfo>,
}

/// Runs the selected procedure.
pub fn run_procedure(
    kind: ProcedureKind,
    weighting: &dyn Weighting,
    p: &PValues,
    config: &ProcedureConfig,
) -> Result<ProcedureRun, MtpError> {
    let (trace, fdp) = match kind {
        ProcedureKind::Fwer => (fwer_test(weighting, p, &config.alpha)?, None),
        ProcedureKind::KfwerAugmented => (kfwer_augmented(weighting, p, config)?, None),
        ProcedureKind::KfwerAugmentedAdjusted => {
            (kfwer_augmented_adjusted(weighting, p, config)?, None)
        }
        ProcedureKind::KfwerGeneralised => (kfwer_generalised(weighting, p, config)?, None),
        ProcedureKind::KfwerOperative => (kfwer_operative(weighting, p, config)?, None),
        ProcedureKind::FdpAugmented
        | ProcedureKind::FdpAugmentedAdjusted
        | ProcedureKind::FdpGeneralised => {
            let result = match kind {
                ProcedureKind::FdpAugmented => fdp_augmented(weighting, p, config)?,
                ProcedureKind::FdpAugmentedAdjusted => fdp_augmented_adjusted(weighting, p, config)?,
                _ => fdp_generalised(weighting, p, config)?,
            };
            let info = FdpInfo {
                d: result.d,
                k_sequence: result.k_sequence,
                fdr_bounds: result.fdr_bounds,
            };
            (result.trace, Some(info))
        }
    };
    Ok(ProcedureRun { kind, trace, fdp })
}
