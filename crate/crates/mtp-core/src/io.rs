//! File formats: the TOML graph format, DOT export, simulation scenario
//! files, and truth-label files.
//!
//! Graph files list nodes with exact weight strings, directed edges, and
//! optional families. An edge pointing at a family name is split equally
//! among the family's members when the graph is built.

use num_traits::Zero;
use serde::Deserialize;

use crate::config::{Delta, NMax, ProcedureConfig};
use crate::dispatch::ProcedureKind;
use crate::error::MtpError;
use crate::graph::{Family, FamilyEdge, TestingGraph};
use crate::sim::{ExtraStat, SimulationSpec};
use crate::weight::{parse_rational, Weight};

#[derive(Deserialize)]
struct GraphFile {
    nodes: Vec<NodeEntry>,
    #[serde(default)]
    edges: Vec<EdgeEntry>,
    #[serde(default)]
    families: Vec<FamilyEntry>,
}

#[derive(Deserialize)]
struct NodeEntry {
    label: String,
    #[serde(default)]
    weight: Option<String>,
}

#[derive(Deserialize)]
struct EdgeEntry {
    from: String,
    to: String,
    weight: String,
    #[serde(default)]
    epsilon: Option<String>,
}

#[derive(Deserialize)]
struct FamilyEntry {
    name: String,
    members: Vec<String>,
    #[serde(default, rename = "out")]
    out_edges: Vec<FamilyOutEntry>,
}

#[derive(Deserialize)]
struct FamilyOutEntry {
    to: String,
    weight: String,
}

fn parse_error(file: &str, message: impl std::fmt::Display) -> MtpError {
    MtpError::Parse {
        file: file.to_string(),
        message: message.to_string(),
    }
}

fn parse_weight(weight: &str, epsilon: Option<&str>) -> Result<Weight, MtpError> {
    let a = parse_rational(weight)?;
    let b = match epsilon {
        Some(e) => parse_rational(e)?,
        None => num_rational::BigRational::zero(),
    };
    Ok(Weight::new(a, b))
}

/// Parses a graph file; `name` is used in error messages.
pub fn parse_graph(text: &str, name: &str) -> Result<TestingGraph, MtpError> {
    let file: GraphFile =
        toml::from_str(text).map_err(|e| parse_error(name, e.message()))?;
    if file.nodes.is_empty() {
        return Err(parse_error(name, "graph file declares no nodes"));
    }
    let labels: Vec<String> = file.nodes.iter().map(|n| n.label.clone()).collect();
    let m = labels.len();
    let index_of = |label: &str| -> Result<usize, MtpError> {
        labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| parse_error(name, format!("unknown node '{label}'")))
    };
    let mut initial = Vec::with_capacity(m);
    for node in &file.nodes {
        let w = match &node.weight {
            Some(s) => Weight::rational(parse_rational(s).map_err(|e| parse_error(name, e))?),
            None => Weight::zero(),
        };
        initial.push(w);
    }
    let family_members = |fam_name: &str| -> Option<&[String]> {
        file.families
            .iter()
            .find(|f| f.name == fam_name)
            .map(|f| f.members.as_slice())
    };
    let mut transition = vec![vec![Weight::zero(); m]; m];
    for edge in &file.edges {
        let from = index_of(&edge.from)?;
        let weight = parse_weight(&edge.weight, edge.epsilon.as_deref())
            .map_err(|e| parse_error(name, e))?;
        // An edge into a family is shared equally by its members.
        let targets: Vec<usize> = match family_members(&edge.to) {
            Some(members) => members
                .iter()
                .map(|l| index_of(l))
                .collect::<Result<_, _>>()?,
            None => vec![index_of(&edge.to)?],
        };
        let share = &weight
            / &Weight::from_ints(targets.len() as i64, 1);
        for to in targets {
            if to == from {
                return Err(parse_error(name, format!("self-edge on '{}'", edge.from)));
            }
            transition[from][to] = &transition[from][to] + &share;
        }
    }
    let mut families = Vec::new();
    for fam in &file.families {
        let members = fam
            .members
            .iter()
            .map(|l| index_of(l))
            .collect::<Result<Vec<_>, _>>()?;
        let out_edges = fam
            .out_edges
            .iter()
            .map(|o| {
                Ok(FamilyEdge {
                    to: o.to.clone(),
                    weight: Weight::rational(
                        parse_rational(&o.weight).map_err(|e| parse_error(name, e))?,
                    ),
                })
            })
            .collect::<Result<Vec<_>, MtpError>>()?;
        families.push(Family {
            name: fam.name.clone(),
            members,
            out_edges,
        });
    }
    TestingGraph::new(labels, initial, transition, families)
}

/// Renders a graph back into the file format. Families survive the round
/// trip; perturbation terms on edges are written to the `epsilon` field.
pub fn render_graph(graph: &TestingGraph) -> String {
    let mut out = String::new();
    for (i, label) in graph.labels().iter().enumerate() {
        out.push_str("[[nodes]]\n");
        out.push_str(&format!("label = \"{label}\"\n"));
        let w = &graph.initial_weights()[i];
        if !w.is_zero() {
            out.push_str(&format!("weight = \"{}\"\n", w.a()));
        }
        out.push('\n');
    }
    for (i, row) in graph.transition().iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            out.push_str("[[edges]]\n");
            out.push_str(&format!("from = \"{}\"\n", graph.label(i)));
            out.push_str(&format!("to = \"{}\"\n", graph.label(j)));
            out.push_str(&format!("weight = \"{}\"\n", w.a()));
            if !w.b().is_zero() {
                out.push_str(&format!("epsilon = \"{}\"\n", w.b()));
            }
            out.push('\n');
        }
    }
    for fam in graph.families() {
        out.push_str("[[families]]\n");
        out.push_str(&format!("name = \"{}\"\n", fam.name));
        let members: Vec<String> = fam
            .members
            .iter()
            .map(|&i| format!("\"{}\"", graph.label(i)))
            .collect();
        out.push_str(&format!("members = [{}]\n\n", members.join(", ")));
        for edge in &fam.out_edges {
            out.push_str("[[families.out]]\n");
            out.push_str(&format!("to = \"{}\"\n", edge.to));
            out.push_str(&format!("weight = \"{}\"\n\n", edge.weight.a()));
        }
    }
    out
}

/// DOT rendering of the graph, nodes annotated with their weights.
pub fn graph_to_dot(graph: &TestingGraph) -> String {
    dot_of(graph, None)
}

/// DOT rendering after removing the listed nodes (by label) and propagating
/// their weights.
pub fn dot_after_removals(graph: &TestingGraph, remove: &[&str]) -> Result<String, MtpError> {
    let expanded = graph.expand_families()?;
    let mut state = expanded.state();
    for label in remove {
        state.remove_node(expanded.index_of(label)?)?;
    }
    Ok(dot_of(&expanded, Some(&state)))
}

fn dot_of(graph: &TestingGraph, state: Option<&crate::graph::GraphState>) -> String {
    let (weights, transition, live): (&[Weight], &[Vec<Weight>], Vec<usize>) = match state {
        Some(s) => (s.weights(), s.transition_rows(), s.live().iter().collect()),
        None => (
            graph.initial_weights(),
            graph.transition(),
            (0..graph.num_hypotheses()).collect(),
        ),
    };
    let mut out = String::from("digraph testing_graph {\n");
    out.push_str("  rankdir=LR;\n  node [shape=circle];\n");
    for &i in &live {
        out.push_str(&format!(
            "  \"{}\" [label=\"{}\\nw = {}\"];\n",
            graph.label(i),
            graph.label(i),
            weights[i]
        ));
    }
    for &i in &live {
        for &j in &live {
            let w = &transition[i][j];
            if !w.is_zero() {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                    graph.label(i),
                    graph.label(j),
                    w
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Deserialize)]
#[serde(tag = "kind")]
pub enum WeightingSpec {
    /// Closed-form r-of-m gatekeeping weights.
    #[serde(rename = "gatekeeping")]
    Gatekeeping { primaries: usize, required: usize },
    /// A graph file, resolved relative to the scenario file.
    #[serde(rename = "graph")]
    GraphFile { path: String },
}

/// A parsed simulation scenario: hypothesis labels, the sampling and
/// procedure specification, and the weighting to test with.
pub struct SimFile {
    pub labels: Vec<String>,
    pub spec: SimulationSpec,
    pub weighting: WeightingSpec,
}

#[derive(Deserialize)]
struct SimEntry {
    labels: Vec<String>,
    mu_control: Vec<f64>,
    mu_treatment: Vec<f64>,
    sd_control: Vec<f64>,
    sd_treatment: Vec<f64>,
    #[serde(default)]
    rho: f64,
    #[serde(default = "one")]
    n: f64,
    #[serde(default)]
    extra: Vec<ExtraEntry>,
    n_reps: u64,
    seed: u64,
    procedure: String,
    alpha: String,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    delta: Option<String>,
    #[serde(default)]
    gamma: Option<String>,
    #[serde(default)]
    n_max: Option<u64>,
    weighting: WeightingSpec,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
struct ExtraEntry {
    mean: f64,
    sd: f64,
}

/// Builds a `ProcedureConfig` from flag-style optional strings; `delta`
/// accepts "unbounded".
pub fn build_config(
    alpha: &str,
    k: Option<usize>,
    delta: Option<&str>,
    gamma: Option<&str>,
    n_max: Option<u64>,
) -> Result<ProcedureConfig, MtpError> {
    let mut config = ProcedureConfig::at_level(parse_rational(alpha)?)?;
    if let Some(k) = k {
        config = config.with_k(k)?;
    }
    if let Some(delta) = delta {
        let delta = if delta == "unbounded" {
            Delta::Unbounded
        } else {
            Delta::Level(parse_rational(delta)?)
        };
        config = config.with_delta(delta)?;
    }
    if let Some(gamma) = gamma {
        config = config.with_gamma(parse_rational(gamma)?)?;
    }
    if let Some(n_max) = n_max {
        config = config.with_n_max(NMax::Bounded(n_max))?;
    }
    Ok(config)
}

/// Parses a simulation scenario file.
pub fn parse_sim(text: &str, name: &str) -> Result<SimFile, MtpError> {
    let entry: SimEntry = toml::from_str(text).map_err(|e| parse_error(name, e.message()))?;
    let config = build_config(
        &entry.alpha,
        entry.k,
        entry.delta.as_deref(),
        entry.gamma.as_deref(),
        entry.n_max,
    )
    .map_err(|e| parse_error(name, e))?;
    let procedure = ProcedureKind::parse(&entry.procedure).map_err(|e| parse_error(name, e))?;
    let spec = SimulationSpec {
        mu_control: entry.mu_control,
        mu_treatment: entry.mu_treatment,
        sd_control: entry.sd_control,
        sd_treatment: entry.sd_treatment,
        rho: entry.rho,
        n: entry.n,
        extra_stats: entry
            .extra
            .iter()
            .map(|e| ExtraStat {
                mean: e.mean,
                sd: e.sd,
            })
            .collect(),
        n_reps: entry.n_reps,
        seed: entry.seed,
        procedure,
        config,
    };
    if entry.labels.len() != spec.num_hypotheses() {
        return Err(parse_error(
            name,
            format!(
                "{} labels for {} hypotheses",
                entry.labels.len(),
                spec.num_hypotheses()
            ),
        ));
    }
    spec.validate().map_err(|e| parse_error(name, e))?;
    Ok(SimFile {
        labels: entry.labels,
        spec,
        weighting: entry.weighting,
    })
}

/// Parses a truth-label CSV with rows `node,null` where `null` is `true`
/// for a true null hypothesis. Every label must appear exactly once.
pub fn parse_truth_csv(text: &str, labels: &[String]) -> Result<Vec<bool>, MtpError> {
    let mut by_label = std::collections::HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if lineno == 0 && line.to_ascii_lowercase().starts_with("node,") {
            continue;
        }
        let (node, value) = line.split_once(',').ok_or_else(|| {
            parse_error("truth file", format!("line {}: expected 'node,null'", lineno + 1))
        })?;
        let flag = match value.trim() {
            "true" | "1" => true,
            "false" | "0" => false,
            other => {
                return Err(parse_error(
                    "truth file",
                    format!("line {}: '{}' is not a boolean", lineno + 1, other),
                ))
            }
        };
        if by_label.insert(node.trim().to_string(), flag).is_some() {
            return Err(parse_error(
                "truth file",
                format!("duplicate entry for '{}'", node.trim()),
            ));
        }
    }
    labels
        .iter()
        .map(|l| {
            by_label
                .remove(l)
                .ok_or_else(|| parse_error("truth file", format!("missing entry for '{l}'")))
        })
        .collect()
}
