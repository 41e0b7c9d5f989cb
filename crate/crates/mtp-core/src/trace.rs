//! Rejection traces: the ordered record of what a procedure rejected, at
//! which stage, and against which threshold.

use num_rational::BigRational;
use num_traits::One;

use crate::subset::IndexSet;
use crate::weight::Weight;

/// Which part of a procedure produced a rejection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// The FWER-controlling base test, or a generalised-procedure round.
    Base,
    /// Extra rejections granted by an augmented budget.
    Augmented,
    /// The top-up sub-procedure of the generalised test.
    SubProcedure,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Base => "base",
            Stage::Augmented => "augmented",
            Stage::SubProcedure => "subprocedure",
        }
    }
}

/// One rejection: the hypothesis, the stage, the threshold it was compared
/// against, and the live weights at that moment.
#[derive(Debug, Clone)]
pub struct RejectionStep {
    pub index: usize,
    pub stage: Stage,
    pub threshold: Weight,
    pub live_weights: Vec<Weight>,
}

/// Ordered record of rejections; `rejected` and `live` partition the index
/// set.
#[derive(Debug, Clone)]
pub struct RejectionTrace {
    pub m: usize,
    pub steps: Vec<RejectionStep>,
    pub rejected: IndexSet,
    pub live: IndexSet,
}

impl RejectionTrace {
    pub fn empty(m: usize) -> Self {
        RejectionTrace {
            m,
            steps: Vec::new(),
            rejected: IndexSet::EMPTY,
            live: IndexSet::full(m),
        }
    }

    pub fn push(&mut self, step: RejectionStep) {
        self.rejected.insert(step.index);
        self.live.remove(step.index);
        self.steps.push(step);
    }

    pub fn num_rejected(&self) -> usize {
        self.rejected.len()
    }

    pub fn rejected_indices(&self) -> Vec<usize> {
        self.rejected.iter().collect()
    }

    /// Rejections made at a given stage, in order.
    pub fn stage_indices(&self, stage: Stage) -> Vec<usize> {
        self.steps
            .iter()
            .filter(|s| s.stage == stage)
            .map(|s| s.index)
            .collect()
    }
}

/// Per-hypothesis adjusted p-values, capped at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjustedPValues(pub Vec<BigRational>);

impl AdjustedPValues {
    pub fn get(&self, i: usize) -> &BigRational {
        &self.0[i]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.0
    }

    pub fn capped(mut values: Vec<BigRational>) -> Self {
        for v in &mut values {
            if *v > BigRational::one() {
                *v = BigRational::one();
            }
        }
        AdjustedPValues(values)
    }
}
