//! Index subsets as bitmasks over hypothesis indices `0..m` (at most 64).

use std::fmt;

/// A subset of hypothesis indices, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(u64);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn full(m: usize) -> Self {
        assert!(m <= 64, "at most 64 hypotheses supported");
        if m == 64 {
            IndexSet(u64::MAX)
        } else {
            IndexSet((1u64 << m) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut mask = 0u64;
        for i in indices {
            assert!(i < 64);
            mask |= 1 << i;
        }
        IndexSet(mask)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn from_bits(bits: u64) -> Self {
        IndexSet(bits)
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < 64);
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn with(self, i: usize) -> Self {
        let mut s = self;
        s.insert(i);
        s
    }

    pub fn without(self, i: usize) -> Self {
        let mut s = self;
        s.remove(i);
        s
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: IndexSet) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: IndexSet) -> Self {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: IndexSet) -> Self {
        IndexSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self` with exactly `k` elements.
    pub fn subsets_of_size(self, k: usize) -> Vec<IndexSet> {
        let elems: Vec<usize> = self.iter().collect();
        let mut out = Vec::new();
        if k > elems.len() {
            return out;
        }
        let mut pick = vec![0usize; k];
        fn rec(
            elems: &[usize],
            k: usize,
            start: usize,
            depth: usize,
            pick: &mut [usize],
            out: &mut Vec<IndexSet>,
        ) {
            if depth == k {
                out.push(IndexSet::from_indices(pick.iter().copied()));
                return;
            }
            for i in start..=elems.len() - (k - depth) {
                pick[depth] = elems[i];
                rec(elems, k, i + 1, depth + 1, pick, out);
            }
        }
        rec(&elems, k, 0, 0, &mut pick, &mut out);
        out
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_set_ops() {
        let s = IndexSet::from_indices([0, 2, 5]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(2));
        assert!(!s.contains(1));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2, 5]);
        assert!(s.is_subset_of(IndexSet::full(6)));
        assert_eq!(IndexSet::full(6).difference(s).len(), 3);
    }

    #[test]
    fn size_k_subsets() {
        let s = IndexSet::from_indices([1, 3, 4]);
        let pairs = s.subsets_of_size(2);
        assert_eq!(pairs.len(), 3);
        assert!(pairs.contains(&IndexSet::from_indices([1, 3])));
        assert_eq!(s.subsets_of_size(0), vec![IndexSet::EMPTY]);
        assert!(s.subsets_of_size(4).is_empty());
    }
}
