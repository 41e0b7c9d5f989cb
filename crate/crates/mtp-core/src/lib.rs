//! Graph-based multiple hypothesis testing with exact rational arithmetic.
//!
//! Hypotheses are vertices of a weighted directed graph; rejecting one
//! propagates its share of the significance level along its out-edges. On
//! top of that weighting strategy the crate implements sequential testing
//! with familywise error rate control, augmented and generalised procedures
//! controlling the k-FWER, procedures controlling the tail probability of
//! the false discovery proportion, adjusted p-values, entangled graphs, and
//! a Monte Carlo harness for power and error-rate estimation.
//!
//! All weights, thresholds, and p-values are exact rationals, optionally
//! carrying a first-order symbolic perturbation so that grouped hypotheses
//! can release their aggregate level only when the whole group is rejected.
//! Decisions at threshold boundaries are therefore exact, never subject to
//! floating point rounding.

pub mod config;
pub mod datasets;
pub mod dispatch;
pub mod entangled;
pub mod error;
pub mod fdp;
pub mod fwer;
pub mod graph;
pub mod io;
pub mod kfwer;
pub mod pvalues;
pub mod sim;
pub mod subset;
pub mod trace;
pub mod weight;
pub mod weighting;

pub use config::{Delta, NMax, ProcedureConfig};
pub use dispatch::{run_procedure, ProcedureKind, ProcedureRun};
pub use entangled::{entangle, EntangledGraph};
pub use error::MtpError;
pub use fdp::{fdp_augmented, fdp_augmented_adjusted, fdp_generalised, fdr_bounds, FdpResult};
pub use fwer::{adjusted_pvalues, fwer_test, SelectionRule};
pub use graph::{Family, FamilyEdge, GraphState, TestingGraph, ValidationReport};
pub use kfwer::{kfwer_augmented, kfwer_augmented_adjusted, kfwer_generalised, kfwer_operative};
pub use pvalues::{parse_pvalue_csv, PValues};
pub use sim::{
    estimate_error_rates, estimate_marginal_power, oracle_subset_weights, random_graph,
    sample_test_statistics, GraphStyle, PowerReport, SimulationSpec,
};
pub use subset::IndexSet;
pub use trace::{AdjustedPValues, RejectionTrace, Stage};
pub use weight::{parse_rational, Weight};
pub use weighting::{EntangledWeighting, GatekeepingWeighting, GraphWeighting, Weighting};
