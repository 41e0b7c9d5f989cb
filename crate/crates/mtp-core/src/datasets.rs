//! Bundled case-study data and the expected outcomes the implementation is
//! checked against: a four-hypothesis diabetes trial graph, a fifteen
//! hypothesis pharmacodynamic dose/time study, a seven-hypothesis heart
//! failure study with two secondary families, and a simulated two-arm trial
//! scenario gated six-of-nine.

use crate::dispatch::ProcedureKind;
use crate::error::MtpError;
use crate::graph::TestingGraph;
use crate::io::parse_graph;
use crate::pvalues::{parse_pvalue_csv, PValues};

pub const DIABETES_GRAPH: &str = include_str!("../data/diabetes.graph");
pub const DIABETES_PVALS: &str = include_str!("../data/diabetes.pvals");
pub const DIABETES_FDP_PVALS: &str = include_str!("../data/diabetes_fdp.pvals");
pub const PD_FOCUSED_GRAPH: &str = include_str!("../data/pd_focused.graph");
pub const PD_UNIFORM_GRAPH: &str = include_str!("../data/pd_uniform.graph");
pub const PD_PVALS: &str = include_str!("../data/pd.pvals");
pub const ATMOSPHERE_GRAPH: &str = include_str!("../data/atmosphere.graph");
pub const ATMOSPHERE_PVALS: &str = include_str!("../data/atmosphere.pvals");
pub const PRERELAX_SIM: &str = include_str!("../data/prerelax.sim");
pub const PRERELAX_TRUTH: &str = include_str!("../data/prerelax.truth");

pub fn diabetes_graph() -> TestingGraph {
    parse_graph(DIABETES_GRAPH, "diabetes.graph").expect("bundled graph parses")
}

pub fn atmosphere_graph() -> TestingGraph {
    parse_graph(ATMOSPHERE_GRAPH, "atmosphere.graph").expect("bundled graph parses")
}

/// The dose/time study graph, either with weight 1/3 on the three focused
/// hypotheses or uniform 1/15 weights.
pub fn pd_graph(uniform: bool) -> TestingGraph {
    let text = if uniform { PD_UNIFORM_GRAPH } else { PD_FOCUSED_GRAPH };
    parse_graph(text, "pd.graph").expect("bundled graph parses")
}

pub fn pvalues_for(graph: &TestingGraph, csv: &str) -> Result<PValues, MtpError> {
    parse_pvalue_csv(csv, graph.labels())
}

/// One expected case-study outcome: procedure, parameters, and the labels
/// of the hypotheses it must reject (alpha and delta per the study).
pub struct ExpectedOutcome {
    pub procedure: ProcedureKind,
    pub k: usize,
    /// Proportion bound for the FDP rows, as exact text; empty otherwise.
    pub gamma: &'static str,
    pub rejected: &'static [&'static str],
}

/// Expected rejection sets for the dose/time study at `alpha = 0.05`,
/// `delta = 1`, with the focused initial weights (1/3 on T4D3, T5D2, T5D3).
pub fn pd_focused_expected() -> Vec<ExpectedOutcome> {
    use ProcedureKind::*;
    let eight: &[&str] = &[
        "T2D3", "T3D2", "T3D3", "T4D2", "T4D3", "T5D1", "T5D2", "T5D3",
    ];
    let three: &[&str] = &["T4D3", "T5D2", "T5D3"];
    vec![
        row(KfwerGeneralised, 1, "", eight),
        row(KfwerGeneralised, 2, "", three),
        row(KfwerGeneralised, 3, "", three),
        row(KfwerAugmented, 1, "", eight),
        row(
            KfwerAugmented,
            2,
            "",
            &["T2D3", "T3D2", "T3D3", "T4D1", "T4D2", "T4D3", "T5D1", "T5D2", "T5D3"],
        ),
        row(
            KfwerAugmented,
            3,
            "",
            &["T2D3", "T3D1", "T3D2", "T3D3", "T4D1", "T4D2", "T4D3", "T5D1", "T5D2", "T5D3"],
        ),
        row(FdpGeneralised, 1, "0.1", eight),
        row(FdpGeneralised, 1, "0.2", three),
        row(FdpGeneralised, 1, "0.3", three),
        row(FdpAugmented, 1, "0.1", eight),
        row(
            FdpAugmented,
            1,
            "0.2",
            &["T2D3", "T3D1", "T3D2", "T3D3", "T4D1", "T4D2", "T4D3", "T5D1", "T5D2", "T5D3"],
        ),
        row(
            FdpAugmented,
            1,
            "0.3",
            &[
                "T2D2", "T2D3", "T3D1", "T3D2", "T3D3", "T4D1", "T4D2", "T4D3", "T5D1", "T5D2",
                "T5D3",
            ],
        ),
    ]
}

/// Expected rejection sets for the dose/time study with uniform 1/15
/// initial weights, at `alpha = 0.05`, `delta = 1`.
pub fn pd_uniform_expected() -> Vec<ExpectedOutcome> {
    use ProcedureKind::*;
    let seven: &[&str] = &["T2D3", "T3D2", "T3D3", "T4D2", "T4D3", "T5D2", "T5D3"];
    let eight_gen: &[&str] = &[
        "T2D2", "T2D3", "T3D2", "T3D3", "T4D2", "T4D3", "T5D2", "T5D3",
    ];
    let eight_aug: &[&str] = &[
        "T2D3", "T3D2", "T3D3", "T4D2", "T4D3", "T5D1", "T5D2", "T5D3",
    ];
    vec![
        row(KfwerGeneralised, 1, "", seven),
        row(KfwerGeneralised, 2, "", eight_gen),
        row(KfwerGeneralised, 3, "", eight_gen),
        row(KfwerAugmented, 1, "", seven),
        row(KfwerAugmented, 2, "", eight_aug),
        row(
            KfwerAugmented,
            3,
            "",
            &["T2D2", "T2D3", "T3D2", "T3D3", "T4D2", "T4D3", "T5D1", "T5D2", "T5D3"],
        ),
        row(FdpGeneralised, 1, "0.1", seven),
        row(FdpGeneralised, 1, "0.2", eight_gen),
        row(FdpGeneralised, 1, "0.3", eight_gen),
        row(FdpAugmented, 1, "0.1", seven),
        row(FdpAugmented, 1, "0.2", eight_aug),
        row(
            FdpAugmented,
            1,
            "0.3",
            &["T2D2", "T2D3", "T3D1", "T3D2", "T3D3", "T4D2", "T4D3", "T5D1", "T5D2", "T5D3"],
        ),
    ]
}

/// Expected rejection sets for the heart failure study at `alpha = 0.025`,
/// `delta = 0.5`.
pub fn atmosphere_expected() -> Vec<ExpectedOutcome> {
    use ProcedureKind::*;
    vec![
        row(Fwer, 1, "", &["H2", "H51", "H52"]),
        row(KfwerAugmented, 2, "", &["H2", "H51", "H52", "H3"]),
        row(KfwerGeneralised, 2, "", &["H2"]),
        row(FdpAugmented, 1, "0.3", &["H2", "H51", "H52", "H3"]),
        row(FdpGeneralised, 1, "0.3", &["H2"]),
    ]
}

fn row(
    procedure: ProcedureKind,
    k: usize,
    gamma: &'static str,
    rejected: &'static [&'static str],
) -> ExpectedOutcome {
    ExpectedOutcome {
        procedure,
        k,
        gamma,
        rejected,
    }
}
