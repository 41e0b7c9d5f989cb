//! Weighting strategies behind the testing procedures.
//!
//! Every procedure only needs the weights `w_j(J)` for the live sets and
//! rejection subsets it visits, so they are written against the [`Weighting`]
//! trait. Graph-backed, entangled, and closed-form gatekeeping weightings all
//! plug in here. Weight vectors are memoized per subset: they depend on the
//! strategy alone, never on the observed p-values.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;

use crate::entangled::EntangledGraph;
use crate::error::MtpError;
use crate::graph::TestingGraph;
use crate::subset::IndexSet;
use crate::weight::Weight;

/// Provides the weight vector `(w_j(J))_{j in J}` for any nonempty subset.
///
/// Implementations must be deterministic and satisfy the monotonicity
/// condition `w_j(J) <= w_j(J')` for `J' subset of J`.
pub trait Weighting: Sync {
    fn num_hypotheses(&self) -> usize;

    /// Full-length weight vector for the given live subset; entries outside
    /// the subset are zero.
    fn weights(&self, subset: IndexSet) -> Arc<Vec<Weight>>;
}

/// Graph-backed weighting with a lazily populated subset-weight table.
pub struct GraphWeighting {
    graph: TestingGraph,
    table: RwLock<HashMap<u64, Arc<Vec<Weight>>>>,
}

impl GraphWeighting {
    /// Validates the graph, expands any families, and wraps it.
    pub fn new(graph: &TestingGraph) -> Result<Self, MtpError> {
        graph.ensure_valid()?;
        let expanded = graph.expand_families()?;
        expanded.ensure_valid()?;
        Ok(GraphWeighting {
            graph: expanded,
            table: RwLock::new(HashMap::new()),
        })
    }

    /// The expanded graph this weighting evaluates.
    pub fn graph(&self) -> &TestingGraph {
        &self.graph
    }
}

impl Weighting for GraphWeighting {
    fn num_hypotheses(&self) -> usize {
        self.graph.num_hypotheses()
    }

    fn weights(&self, subset: IndexSet) -> Arc<Vec<Weight>> {
        if let Some(hit) = self.table.read().unwrap().get(&subset.bits()) {
            return Arc::clone(hit);
        }
        let ws = Arc::new(
            self.graph
                .subset_weights(subset)
                .expect("subset weights for a validated graph"),
        );
        self.table
            .write()
            .unwrap()
            .entry(subset.bits())
            .or_insert(ws)
            .clone()
    }
}

/// Weighting of an entangled graph: the mixing-weighted sum of the
/// component weightings.
pub struct EntangledWeighting {
    entangled: EntangledGraph,
    table: RwLock<HashMap<u64, Arc<Vec<Weight>>>>,
}

impl EntangledWeighting {
    pub fn new(entangled: EntangledGraph) -> Result<Self, MtpError> {
        for g in entangled.components() {
            g.ensure_valid()?;
        }
        Ok(EntangledWeighting {
            entangled,
            table: RwLock::new(HashMap::new()),
        })
    }
}

impl Weighting for EntangledWeighting {
    fn num_hypotheses(&self) -> usize {
        self.entangled.num_hypotheses()
    }

    fn weights(&self, subset: IndexSet) -> Arc<Vec<Weight>> {
        if let Some(hit) = self.table.read().unwrap().get(&subset.bits()) {
            return Arc::clone(hit);
        }
        let ws = Arc::new(
            self.entangled
                .subset_weights(subset)
                .expect("subset weights for validated components"),
        );
        self.table
            .write()
            .unwrap()
            .entry(subset.bits())
            .or_insert(ws)
            .clone()
    }
}

/// Closed-form weighting for an r-of-m gatekeeping design: `m1` primary
/// hypotheses tested by Holm, with the full level passed to one secondary
/// hypothesis once `required` primaries are rejected.
///
/// This is the weight schedule induced by entangling the `C(m1, required)`
/// Holm components with equal mixing weights; the entangled construction
/// reproduces it, which the tests check directly.
pub struct GatekeepingWeighting {
    primaries: usize,
    required: usize,
}

impl GatekeepingWeighting {
    pub fn new(primaries: usize, required: usize) -> Result<Self, MtpError> {
        if required == 0 || required > primaries || primaries + 1 > 64 {
            return Err(MtpError::Usage(format!(
                "invalid gatekeeping design: {required} of {primaries}"
            )));
        }
        Ok(GatekeepingWeighting { primaries, required })
    }

    /// Index of the secondary hypothesis (the last one).
    pub fn secondary_index(&self) -> usize {
        self.primaries
    }

    fn components_total(&self) -> BigRational {
        BigRational::from_integer(binomial(
            BigInt::from(self.primaries),
            BigInt::from(self.required),
        ))
    }

    /// Weight of each live primary when `live_primaries` of them remain.
    /// Averages, over all components containing the primary, the Holm share
    /// among that component's surviving members.
    pub fn primary_weight(&self, live_primaries: usize) -> BigRational {
        let mut sum = BigRational::from_integer(BigInt::from(0));
        for survivors in 1..=self.required.min(live_primaries) {
            let ways = binomial(BigInt::from(live_primaries - 1), BigInt::from(survivors - 1))
                * binomial(
                    BigInt::from(self.primaries - live_primaries),
                    BigInt::from(self.required - survivors),
                );
            sum += BigRational::new(ways, BigInt::from(survivors));
        }
        sum / self.components_total()
    }

    /// Weight of the secondary hypothesis: the fraction of components whose
    /// members have all been rejected.
    pub fn secondary_weight(&self, live_primaries: usize) -> BigRational {
        if self.primaries - live_primaries < self.required {
            return BigRational::from_integer(BigInt::from(0));
        }
        BigRational::from_integer(binomial(
            BigInt::from(self.primaries - live_primaries),
            BigInt::from(self.required),
        )) / self.components_total()
    }
}

impl Weighting for GatekeepingWeighting {
    fn num_hypotheses(&self) -> usize {
        self.primaries + 1
    }

    fn weights(&self, subset: IndexSet) -> Arc<Vec<Weight>> {
        let m = self.num_hypotheses();
        let primary_mask = IndexSet::full(self.primaries);
        let live_primaries = subset.intersection(primary_mask).len();
        let mut ws = vec![Weight::zero(); m];
        if live_primaries > 0 {
            let w = Weight::rational(self.primary_weight(live_primaries));
            for i in subset.intersection(primary_mask).iter() {
                ws[i] = w.clone();
            }
        }
        if subset.contains(self.primaries) {
            ws[self.primaries] = Weight::rational(self.secondary_weight(live_primaries));
        }
        Arc::new(ws)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn gatekeeping_schedule_matches_known_values() {
        // 6-of-9 design: the published weight schedule by number of
        // unrejected primaries.
        let g = GatekeepingWeighting::new(9, 6).unwrap();
        assert_eq!(g.primary_weight(9), r(1, 9));
        assert_eq!(g.primary_weight(4), r(1, 4));
        assert_eq!(g.primary_weight(3), r(83, 252));
        assert_eq!(g.secondary_weight(3), r(1, 84));
        assert_eq!(g.primary_weight(2), r(11, 24));
        assert_eq!(g.secondary_weight(2), r(1, 12));
        assert_eq!(g.primary_weight(1), r(2, 3));
        assert_eq!(g.secondary_weight(1), r(1, 3));
        assert_eq!(g.secondary_weight(0), r(1, 1));
        assert_eq!(g.secondary_weight(4), r(0, 1));
    }

    #[test]
    fn gatekeeping_weights_vector_shape() {
        let g = GatekeepingWeighting::new(9, 6).unwrap();
        let live = IndexSet::from_indices([0, 1, 2, 9]);
        let ws = g.weights(live);
        assert_eq!(ws[0], Weight::rational(r(83, 252)));
        assert_eq!(ws[9], Weight::rational(r(1, 84)));
        assert!(ws[3].is_zero());
    }
}
