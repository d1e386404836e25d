use fixedbitset::FixedBitSet;

/// A subset of the ground set, indexed by canonical point position.
pub type PointSet = FixedBitSet;

/// Builds a point set of capacity `n` from indices.
pub fn point_set(n: usize, members: impl IntoIterator<Item = usize>) -> PointSet {
    let mut s = FixedBitSet::with_capacity(n);
    for m in members {
        s.insert(m);
    }
    s
}

/// A binary relation on a ground set of `n` points, stored as one bit row per point.
///
/// Row `x` holds every `y` with `(x, y)` in the relation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Entourage {
    rows: Vec<FixedBitSet>,
}

impl std::fmt::Debug for Entourage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

impl Entourage {
    pub fn empty(n: usize) -> Self {
        Entourage {
            rows: (0..n).map(|_| FixedBitSet::with_capacity(n)).collect(),
        }
    }

    pub fn diagonal(n: usize) -> Self {
        let mut e = Self::empty(n);
        for x in 0..n {
            e.rows[x].insert(x);
        }
        e
    }

    pub fn full(n: usize) -> Self {
        let mut e = Self::empty(n);
        for row in &mut e.rows {
            row.insert_range(..);
        }
        e
    }

    /// Panics if a pair references an index outside the ground set.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut e = Self::empty(n);
        for (x, y) in pairs {
            e.insert(x, y);
        }
        e
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.rows[x].insert(y);
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    pub fn row(&self, x: usize) -> &FixedBitSet {
        &self.rows[x]
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_clear())
    }

    /// All pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.ones().map(move |y| (x, y)))
    }

    pub fn inverse(&self) -> Self {
        let mut e = Self::empty(self.size());
        for (x, y) in self.pairs() {
            e.insert(y, x);
        }
        e
    }

    pub fn union_with(&mut self, other: &Entourage) {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            a.union_with(b);
        }
    }

    pub fn union(&self, other: &Entourage) -> Self {
        let mut e = self.clone();
        e.union_with(other);
        e
    }

    pub fn intersection(&self, other: &Entourage) -> Self {
        let mut e = self.clone();
        for (a, b) in e.rows.iter_mut().zip(&other.rows) {
            a.intersect_with(b);
        }
        e
    }

    /// `self ∘ other = {(x, z) : (x, y) ∈ self, (y, z) ∈ other}`.
    pub fn compose(&self, other: &Entourage) -> Self {
        let n = self.size();
        let mut e = Self::empty(n);
        for x in 0..n {
            let mut acc = FixedBitSet::with_capacity(n);
            for y in self.rows[x].ones() {
                acc.union_with(&other.rows[y]);
            }
            e.rows[x] = acc;
        }
        e
    }

    pub fn is_subset(&self, other: &Entourage) -> bool {
        self.rows
            .iter()
            .zip(&other.rows)
            .all(|(a, b)| a.is_subset(b))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(x, y)| self.contains(y, x))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size()).all(|x| self.contains(x, x))
    }

    /// `U[B] = {x : ∃ b ∈ B, (x, b) ∈ U}`.
    pub fn thicken(&self, set: &PointSet) -> PointSet {
        let n = self.size();
        let mut out = FixedBitSet::with_capacity(n);
        for x in 0..n {
            if !self.rows[x].is_disjoint(set) {
                out.insert(x);
            }
        }
        out
    }

    /// Whether `B × B ⊆ U`.
    pub fn bounds(&self, set: &PointSet) -> bool {
        set.ones().all(|x| set.is_subset(&self.rows[x]))
    }

    /// Image of the relation under a map of ground sets.
    pub fn image(&self, table: &[usize], target_size: usize) -> Self {
        let mut e = Self::empty(target_size);
        for (x, y) in self.pairs() {
            e.insert(table[x], table[y]);
        }
        e
    }

    /// Restriction to `A × A`, reindexed by the ascending positions of `A`.
    pub fn restrict(&self, subset: &[usize]) -> Self {
        let mut e = Self::empty(subset.len());
        for (i, &x) in subset.iter().enumerate() {
            for (j, &y) in subset.iter().enumerate() {
                if self.contains(x, y) {
                    e.insert(i, j);
                }
            }
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_inverse() {
        let u = Entourage::from_pairs(3, [(0, 1)]);
        let v = Entourage::from_pairs(3, [(1, 2)]);
        assert_eq!(u.compose(&v), Entourage::from_pairs(3, [(0, 2)]));
        assert_eq!(u.inverse(), Entourage::from_pairs(3, [(1, 0)]));
        assert!(v.compose(&u).is_empty());
    }

    #[test]
    fn thickening_of_empty_set_is_empty() {
        let u = Entourage::full(4);
        assert!(u.thicken(&PointSet::with_capacity(4)).is_clear());
    }

    #[test]
    fn diagonal_bounds_only_singletons() {
        let d = Entourage::diagonal(3);
        assert!(d.bounds(&point_set(3, [1])));
        assert!(!d.bounds(&point_set(3, [0, 1])));
        assert!(d.bounds(&point_set(3, [])));
    }
}
