//! Procedure parameters.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::MtpError;

/// Augmentation level for the extra-rejection stage: a plain level, or
/// unbounded (every remaining hypothesis passes, in ratio order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Delta {
    Level(BigRational),
    Unbounded,
}

impl Delta {
    pub fn level(&self) -> Option<&BigRational> {
        match self {
            Delta::Level(l) => Some(l),
            Delta::Unbounded => None,
        }
    }
}

/// Cap on the number of subsets the operative procedure may evaluate per
/// threshold; unbounded recovers the generalised procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NMax {
    Bounded(u64),
    Unbounded,
}

/// Parameters shared by the testing procedures. `gamma` is only read by the
/// FDP procedures and `n_max` only by the operative one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcedureConfig {
    pub alpha: BigRational,
    pub k: usize,
    pub delta: Delta,
    pub gamma: BigRational,
    pub n_max: NMax,
}

impl ProcedureConfig {
    /// Config with `k = 1`, `gamma = 0`, `delta = alpha` defaults.
    pub fn at_level(alpha: BigRational) -> Result<Self, MtpError> {
        if alpha <= BigRational::zero() || alpha >= BigRational::one() {
            return Err(MtpError::Usage(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(ProcedureConfig {
            delta: Delta::Level(alpha.clone()),
            alpha,
            k: 1,
            gamma: BigRational::zero(),
            n_max: NMax::Unbounded,
        })
    }

    pub fn with_k(mut self, k: usize) -> Result<Self, MtpError> {
        if k == 0 {
            return Err(MtpError::Usage("k must be at least 1".into()));
        }
        self.k = k;
        Ok(self)
    }

    pub fn with_delta(mut self, delta: Delta) -> Result<Self, MtpError> {
        if let Delta::Level(l) = &delta {
            if l < &BigRational::zero() {
                return Err(MtpError::Usage(format!("delta must be nonnegative, got {l}")));
            }
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: BigRational) -> Result<Self, MtpError> {
        if gamma < BigRational::zero() || gamma >= BigRational::one() {
            return Err(MtpError::Usage(format!(
                "gamma must lie in [0, 1), got {gamma}"
            )));
        }
        self.gamma = gamma;
        Ok(self)
    }

    pub fn with_n_max(mut self, n_max: NMax) -> Result<Self, MtpError> {
        if let NMax::Bounded(0) = n_max {
            return Err(MtpError::Usage("n_max must be positive".into()));
        }
        self.n_max = n_max;
        Ok(self)
    }
}
