//! Entangled graphs: convex combinations of component testing graphs over
//! the same node set. Entanglement gives the procedure memory of where
//! propagated significance level originated.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::MtpError;
use crate::graph::TestingGraph;
use crate::subset::IndexSet;
use crate::weight::Weight;

/// A convex combination of component graphs sharing one node set.
#[derive(Debug, Clone)]
pub struct EntangledGraph {
    components: Vec<TestingGraph>,
    mixing: Vec<BigRational>,
}

/// Builds an entangled graph from components and a mixing vector `c` with
/// nonnegative entries summing to 1. All components must share the hypothesis
/// count and node labels.
pub fn entangle(
    components: Vec<TestingGraph>,
    mixing: Vec<BigRational>,
) -> Result<EntangledGraph, MtpError> {
    if components.is_empty() {
        return Err(MtpError::Usage("entangled graph needs at least one component".into()));
    }
    if components.len() != mixing.len() {
        return Err(MtpError::Usage(
            "mixing vector length must match the number of components".into(),
        ));
    }
    let labels = components[0].labels().to_vec();
    for g in &components[1..] {
        if g.labels() != labels.as_slice() {
            return Err(MtpError::Usage(
                "all components must share the same node set".into(),
            ));
        }
    }
    let mut sum = BigRational::zero();
    for c in &mixing {
        if c < &BigRational::zero() {
            return Err(MtpError::Usage("mixing weights must be nonnegative".into()));
        }
        sum += c;
    }
    if !sum.is_one() {
        return Err(MtpError::Usage(format!(
            "mixing weights must sum to 1, got {sum}"
        )));
    }
    Ok(EntangledGraph { components, mixing })
}

impl EntangledGraph {
    pub fn num_hypotheses(&self) -> usize {
        self.components[0].num_hypotheses()
    }

    pub fn components(&self) -> &[TestingGraph] {
        &self.components
    }

    pub fn mixing(&self) -> &[BigRational] {
        &self.mixing
    }

    /// Entangled subset weights: the c-weighted sum of the component
    /// subset weights.
    pub fn subset_weights(&self, subset: IndexSet) -> Result<Vec<Weight>, MtpError> {
        let m = self.num_hypotheses();
        let mut total = vec![Weight::zero(); m];
        for (g, c) in self.components.iter().zip(&self.mixing) {
            if c.is_zero() {
                continue;
            }
            let scale = Weight::rational(c.clone());
            let ws = g.subset_weights(subset)?;
            for (acc, w) in total.iter_mut().zip(&ws) {
                *acc = &*acc + &(&scale * w);
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn two_node(w1: (i64, i64), g12: (i64, i64)) -> TestingGraph {
        let labels = vec!["H1".into(), "H2".into()];
        let initial = vec![
            Weight::rational(r(w1.0, w1.1)),
            Weight::rational(&BigRational::one() - &r(w1.0, w1.1)),
        ];
        let mut transition = vec![vec![Weight::zero(); 2]; 2];
        transition[0][1] = Weight::rational(r(g12.0, g12.1));
        transition[1][0] = Weight::rational(r(1, 2));
        TestingGraph::new(labels, initial, transition, vec![]).unwrap()
    }

    #[test]
    fn degenerate_mixing_returns_first_component() {
        let a = two_node((1, 3), (1, 1));
        let b = two_node((1, 2), (1, 4));
        let e = entangle(vec![a.clone(), b], vec![r(1, 1), r(0, 1)]).unwrap();
        for mask in [IndexSet::full(2), IndexSet::from_indices([0]), IndexSet::from_indices([1])] {
            assert_eq!(e.subset_weights(mask).unwrap(), a.subset_weights(mask).unwrap());
        }
    }

    #[test]
    fn mixing_must_be_a_distribution() {
        let a = two_node((1, 3), (1, 1));
        let b = two_node((1, 2), (1, 4));
        assert!(entangle(vec![a.clone(), b.clone()], vec![r(1, 2), r(1, 3)]).is_err());
        assert!(entangle(vec![a, b], vec![r(3, 2), r(-1, 2)]).is_err());
    }

    #[test]
    fn mismatched_node_sets_rejected() {
        let a = two_node((1, 3), (1, 1));
        let labels = vec!["X1".into(), "X2".into()];
        let initial = vec![Weight::rational(r(1, 2)); 2];
        let transition = vec![vec![Weight::zero(); 2]; 2];
        let b = TestingGraph::new(labels, initial, transition, vec![]).unwrap();
        assert!(entangle(vec![a, b], vec![r(1, 2), r(1, 2)]).is_err());
    }
}
