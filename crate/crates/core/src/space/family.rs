use std::collections::BTreeMap;

use super::{BornCoarseSpace, PointSet};

/// A finite nested prefix `Y_0 ⊆ … ⊆ Y_m` of a big family, with the bigness
/// witnesses that could be verified inside the prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFamilyPrefix {
    members: Vec<PointSet>,
    /// `(i, k) ↦ Some(j)` when `closure_at(k)[Y_i] ⊆ Y_j` for the least such `j ≤ m`,
    /// `None` when no member of the prefix absorbs the thickening.
    witness: BTreeMap<(usize, usize), Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("family members are not nested: member {0} is not contained in member {1}")]
pub struct NotNested(pub usize, pub usize);

impl BigFamilyPrefix {
    /// Validates nesting and fills witnesses for scale-indices `0..=max_scale`.
    pub fn new(
        space: &BornCoarseSpace,
        members: Vec<PointSet>,
        max_scale: usize,
    ) -> Result<Self, NotNested> {
        for (i, w) in members.windows(2).enumerate() {
            if !w[0].is_subset(&w[1]) {
                return Err(NotNested(i, i + 1));
            }
        }
        let mut fam = BigFamilyPrefix {
            members,
            witness: BTreeMap::new(),
        };
        for k in 0..=max_scale {
            for i in 0..fam.members.len() {
                let w = fam.compute_witness(space, i, k);
                fam.witness.insert((i, k), w);
            }
        }
        Ok(fam)
    }

    /// The family `{A}` generated by `A`: `Y_i = closure_at(i)[A]` for `i = 0..=depth`.
    pub fn generated(space: &BornCoarseSpace, seed: &PointSet, depth: usize) -> Self {
        let members = (0..=depth).map(|i| space.thicken(i, seed)).collect();
        Self::new(space, members, depth).expect("thickenings are nested")
    }

    pub fn members(&self) -> &[PointSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn last(&self) -> Option<&PointSet> {
        self.members.last()
    }

    fn compute_witness(&self, space: &BornCoarseSpace, i: usize, k: usize) -> Option<usize> {
        let thick = space.thicken(k, &self.members[i]);
        self.members.iter().position(|y| thick.is_subset(y))
    }

    /// Recorded witness, or a fresh verified computation for scales not filled at construction.
    pub fn witness(&self, space: &BornCoarseSpace, i: usize, k: usize) -> Option<usize> {
        match self.witness.get(&(i, k)) {
            Some(w) => *w,
            None => self.compute_witness(space, i, k),
        }
    }

    pub fn recorded_witnesses(&self) -> &BTreeMap<(usize, usize), Option<usize>> {
        &self.witness
    }
}
