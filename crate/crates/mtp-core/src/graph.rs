//! Testing graph data model: hypotheses as weighted vertices, directed
//! weighted edges describing how a rejected hypothesis's significance level
//! is propagated, plus validation, the node-removal update rule, subset
//! weights and family expansion.

use num_rational::BigRational;
use num_traits::One;

use crate::error::MtpError;
use crate::subset::IndexSet;
use crate::weight::Weight;

/// Identifies a hypothesis: 1-based index (matching the usual H_1..H_m
/// numbering) plus a display label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeId {
    pub index: usize,
    pub label: String,
}

/// Target of a family out-edge: either a plain node or another family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyEdge {
    pub to: String,
    pub weight: Weight,
}

/// A group of hypotheses tested internally by a Holm procedure. The group's
/// aggregate significance level leaves the group, along its out-edges, only
/// once every member has been rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub name: String,
    /// 0-based member indices.
    pub members: Vec<usize>,
    pub out_edges: Vec<FamilyEdge>,
}

/// An immutable testing graph: initial weights `w_i(M)` and transition
/// matrix `G = (g_ij)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestingGraph {
    labels: Vec<String>,
    initial: Vec<Weight>,
    transition: Vec<Vec<Weight>>,
    families: Vec<Family>,
}

/// One violated regularity constraint, reported with 1-based node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation(pub String);

/// Outcome of `validate`: violations are data, not faults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl TestingGraph {
    pub fn new(
        labels: Vec<String>,
        initial: Vec<Weight>,
        transition: Vec<Vec<Weight>>,
        families: Vec<Family>,
    ) -> Result<Self, MtpError> {
        let m = labels.len();
        if m == 0 || m > 64 {
            return Err(MtpError::Usage(format!(
                "graph must have between 1 and 64 hypotheses, got {m}"
            )));
        }
        if initial.len() != m || transition.len() != m || transition.iter().any(|r| r.len() != m) {
            return Err(MtpError::Usage(
                "initial weights and transition matrix must match the hypothesis count".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(MtpError::Usage(format!("duplicate node label '{l}'")));
            }
        }
        let mut in_family = vec![false; m];
        for f in &families {
            for &i in &f.members {
                if i >= m {
                    return Err(MtpError::Usage(format!(
                        "family '{}' references node index out of range",
                        f.name
                    )));
                }
                if in_family[i] {
                    return Err(MtpError::Usage(format!(
                        "node '{}' belongs to more than one family",
                        labels[i]
                    )));
                }
                in_family[i] = true;
            }
            if f.members.len() < 2 {
                return Err(MtpError::Usage(format!(
                    "family '{}' must have at least two members",
                    f.name
                )));
            }
        }
        Ok(TestingGraph {
            labels,
            initial,
            transition,
            families,
        })
    }

    pub fn num_hypotheses(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn node_ids(&self) -> Vec<NodeId> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| NodeId {
                index: i + 1,
                label: l.clone(),
            })
            .collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize, MtpError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| MtpError::UnknownLabel(label.to_string()))
    }

    pub fn initial_weights(&self) -> &[Weight] {
        &self.initial
    }

    pub fn transition(&self) -> &[Vec<Weight>] {
        &self.transition
    }

    pub fn edge(&self, from: usize, to: usize) -> &Weight {
        &self.transition[from][to]
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn has_families(&self) -> bool {
        !self.families.is_empty()
    }

    /// Checks the regularity conditions: `0 <= g_ij <= 1`, `g_ii = 0`,
    /// row sums at most 1, and initial weights summing to at most 1.
    /// Bounds are checked lexicographically so the perturbed values still
    /// satisfy them in the `eps -> 0` limit.
    pub fn validate(&self) -> ValidationReport {
        let m = self.num_hypotheses();
        let zero = Weight::zero();
        let one = Weight::one();
        let mut violations = Vec::new();
        let mut weight_sum = Weight::zero();
        for (i, w) in self.initial.iter().enumerate() {
            if *w < zero || w.a() > &BigRational::one() {
                violations.push(Violation(format!(
                    "initial weight of node {} must lie in [0, 1], got {}",
                    i + 1,
                    w
                )));
            }
            weight_sum = &weight_sum + w;
        }
        if weight_sum.a() > &BigRational::one() {
            violations.push(Violation(format!(
                "initial weights must sum to at most 1, got {}",
                weight_sum
            )));
        }
        for i in 0..m {
            if !self.transition[i][i].is_zero() {
                violations.push(Violation(format!("g_ii must be 0 at node {}", i + 1)));
            }
            let mut row_sum = Weight::zero();
            for j in 0..m {
                let g = &self.transition[i][j];
                if *g < zero || *g > one {
                    violations.push(Violation(format!(
                        "edge weight g_{},{} must lie in [0, 1], got {}",
                        i + 1,
                        j + 1,
                        g
                    )));
                }
                row_sum = &row_sum + g;
            }
            if row_sum > one {
                violations.push(Violation(format!(
                    "row sum of node {} must be at most 1, got {}",
                    i + 1,
                    row_sum
                )));
            }
        }
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<(), MtpError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            let text = report
                .violations
                .iter()
                .map(|v| format!("  - {}", v.0))
                .collect::<Vec<_>>()
                .join("\n");
            Err(MtpError::InvalidGraph(text))
        }
    }

    /// Working copy over the full live set.
    pub fn state(&self) -> GraphState {
        GraphState {
            live: IndexSet::full(self.num_hypotheses()),
            weights: self.initial.clone(),
            transition: self.transition.clone(),
        }
    }

    /// The weights `w_j(J)` for the intersection hypothesis over `J`,
    /// obtained by removing the nodes of the complement one at a time.
    /// The result does not depend on the removal order.
    pub fn subset_weights(&self, subset: IndexSet) -> Result<Vec<Weight>, MtpError> {
        let m = self.num_hypotheses();
        if subset.is_empty() {
            return Err(MtpError::Usage("subset must be nonempty".into()));
        }
        if !subset.is_subset_of(IndexSet::full(m)) {
            return Err(MtpError::Usage("subset contains out-of-range indices".into()));
        }
        let mut state = self.state();
        for j in IndexSet::full(m).difference(subset).iter() {
            state.remove_node(j)?;
        }
        Ok(state.weights)
    }

    /// Expands family nodes into plain nodes and edges.
    ///
    /// Each member keeps total internal weight `1 - eps`, split Holm-style
    /// among its siblings, and routes weight `eps` along the family's
    /// out-edges. In the `eps -> 0` limit the family's aggregate level leaves
    /// the family exactly when its last member is rejected. Edges pointing at
    /// a family are split equally among its members. Graphs without families
    /// are returned unchanged.
    pub fn expand_families(&self) -> Result<TestingGraph, MtpError> {
        if self.families.is_empty() {
            return Ok(self.clone());
        }
        let m = self.num_hypotheses();
        let mut transition = self.transition.clone();
        for family in &self.families {
            let size = family.members.len();
            let sibling_share = Weight::new(
                BigRational::new(1.into(), (size as i64 - 1).into()),
                BigRational::new((-1i64).into(), (size as i64 - 1).into()),
            );
            for &i in &family.members {
                for j in 0..m {
                    if !transition[i][j].is_zero() {
                        return Err(MtpError::Usage(format!(
                            "family member '{}' may not carry plain out-edges",
                            self.labels[i]
                        )));
                    }
                }
                for &j in &family.members {
                    if j != i {
                        transition[i][j] = sibling_share.clone();
                    }
                }
                for out in &family.out_edges {
                    let eps_share = Weight::epsilon(out.weight.a().clone());
                    for target in self.resolve_targets(&out.to)? {
                        let split = &eps_share
                            / &Weight::rational(BigRational::from_integer(
                                (self.target_count(&out.to)? as i64).into(),
                            ));
                        transition[i][target] = &transition[i][target] + &split;
                    }
                }
            }
        }
        TestingGraph::new(self.labels.clone(), self.initial.clone(), transition, vec![])
    }

    fn resolve_targets(&self, name: &str) -> Result<Vec<usize>, MtpError> {
        if let Some(f) = self.families.iter().find(|f| f.name == name) {
            Ok(f.members.clone())
        } else {
            Ok(vec![self.index_of(name)?])
        }
    }

    fn target_count(&self, name: &str) -> Result<usize, MtpError> {
        Ok(self.resolve_targets(name)?.len())
    }

    /// True if `name` names a family of this graph.
    pub fn family(&self, name: &str) -> Option<&Family> {
        self.families.iter().find(|f| f.name == name)
    }
}

/// Mutable working copy of a graph restricted to a live set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphState {
    live: IndexSet,
    weights: Vec<Weight>,
    transition: Vec<Vec<Weight>>,
}

impl GraphState {
    pub fn live(&self) -> IndexSet {
        self.live
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Weight {
        &self.weights[i]
    }

    pub fn edge(&self, from: usize, to: usize) -> &Weight {
        &self.transition[from][to]
    }

    pub fn transition_rows(&self) -> &[Vec<Weight>] {
        &self.transition
    }

    /// Removes node `j` and propagates its weight along its edges:
    /// `w_l <- w_l + w_j * g_jl` and
    /// `g_lh <- (g_lh + g_lj * g_jh) / (1 - g_lj * g_jl)` when
    /// `g_lj * g_jl < 1`, and 0 otherwise.
    pub fn remove_node(&mut self, j: usize) -> Result<(), MtpError> {
        if !self.live.contains(j) {
            return Err(MtpError::Usage(format!(
                "node {} is not live and cannot be removed",
                j + 1
            )));
        }
        let one = Weight::one();
        let remaining = self.live.without(j);
        let old = self.transition.clone();
        let wj = self.weights[j].clone();
        for l in remaining.iter() {
            self.weights[l] = &self.weights[l] + &(&wj * &old[j][l]);
        }
        self.weights[j] = Weight::zero();
        for l in remaining.iter() {
            for h in remaining.iter() {
                if l == h {
                    continue;
                }
                let loopback = &old[l][j] * &old[j][l];
                self.transition[l][h] = if loopback < one {
                    let num = &old[l][h] + &(&old[l][j] * &old[j][h]);
                    if num.is_zero() {
                        Weight::zero()
                    } else {
                        &num / &(&one - &loopback)
                    }
                } else {
                    Weight::zero()
                };
            }
        }
        for i in 0..self.weights.len() {
            self.transition[i][j] = Weight::zero();
            self.transition[j][i] = Weight::zero();
        }
        self.live = remaining;
        debug_assert!(self.satisfies_regularity(), "update broke regularity");
        Ok(())
    }

    /// Regularity of the live sub-graph, in the lexicographic sense.
    pub fn satisfies_regularity(&self) -> bool {
        let zero = Weight::zero();
        let one = Weight::one();
        for l in self.live.iter() {
            if self.weights[l] < zero || self.weights[l].a() > &BigRational::one() {
                return false;
            }
            let mut row = Weight::zero();
            for h in self.live.iter() {
                let g = &self.transition[l][h];
                if *g < zero || *g > one || (l == h && !g.is_zero()) {
                    return false;
                }
                row = &row + g;
            }
            if row > one {
                return false;
            }
        }
        true
    }
}
