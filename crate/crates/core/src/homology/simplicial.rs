use std::collections::BTreeSet;

use rayon::prelude::*;

use super::groups::FGAbGroup;
use super::sparse::{self, SparseMatrix};
use super::{EngineConfig, HomologyError};
use crate::space::{BornCoarseSpace, Entourage, PointSet};

/// Finite abstract simplicial complex on vertices `0..n`, truncated at a
/// maximal dimension. Simplices are sorted vertex lists, sorted per dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    n_vertices: usize,
    simplices: Vec<Vec<Vec<u32>>>,
}

impl SimplicialComplex {
    /// Downward closure of `faces`, keeping dimensions `0..=max_dim`.
    pub fn from_faces(n_vertices: usize, faces: &[Vec<u32>], max_dim: usize) -> Self {
        let mut by_dim: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); max_dim + 1];
        for f in faces {
            let mut s = f.clone();
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                continue;
            }
            add_subsets(&s, &mut by_dim);
        }
        SimplicialComplex {
            n_vertices,
            simplices: by_dim.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    /// Clique complex of a reflexive symmetric relation.
    pub fn clique(relation: &Entourage, max_dim: usize, cap: usize) -> Result<Self, HomologyError> {
        let n = relation.size();
        let mut simplices: Vec<Vec<Vec<u32>>> = vec![Vec::new(); max_dim + 1];
        for v in 0..n {
            let mut later = PointSet::with_capacity(n);
            later.insert_range(v + 1..);
            later.intersect_with(relation.row(v));
            grow(relation, &mut vec![v as u32], &later, max_dim, &mut simplices, cap)?;
        }
        for level in &mut simplices {
            level.sort_unstable();
        }
        Ok(SimplicialComplex {
            n_vertices: n,
            simplices,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn max_dim(&self) -> usize {
        self.simplices.len() - 1
    }

    /// Largest dimension with a simplex, or `None` when empty.
    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().rposition(|l| !l.is_empty())
    }

    pub fn simplices(&self, d: usize) -> &[Vec<u32>] {
        self.simplices.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn boundary(&self, d: usize) -> SparseMatrix {
        let upper = self.simplices(d);
        if d == 0 {
            return SparseMatrix::zeros(0, upper.len());
        }
        let lower = self.simplices(d - 1);
        let cols = upper
            .iter()
            .map(|s| {
                (0..s.len())
                    .map(|i| {
                        let face: Vec<u32> =
                            s.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &v)| v).collect();
                        let r = lower.binary_search(&face).expect("complex is downward closed");
                        (r as u32, if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        SparseMatrix::from_columns(lower.len(), cols)
    }

    /// Homology in degrees `0..max_dim`; the top dimension only supplies boundaries.
    pub fn homology(&self) -> Vec<FGAbGroup> {
        let top = self.max_dim();
        let factors: Vec<Vec<num_bigint::BigInt>> = (0..=top)
            .into_par_iter()
            .map(|d| sparse::invariant_factors(&self.boundary(d)))
            .collect();
        (0..top)
            .map(|d| FGAbGroup::from_ranks(self.simplices(d).len(), &factors[d], &factors[d + 1]))
            .collect()
    }

    pub fn betti(&self) -> Vec<usize> {
        self.homology().iter().map(|g| g.free_rank).collect()
    }
}

/// Inserts every nonempty subset of `s` with at most `by_dim.len()` elements.
fn add_subsets(s: &[u32], by_dim: &mut [BTreeSet<Vec<u32>>]) {
    fn pick(s: &[u32], from: usize, cur: &mut Vec<u32>, by_dim: &mut [BTreeSet<Vec<u32>>]) {
        if !cur.is_empty() {
            by_dim[cur.len() - 1].insert(cur.clone());
        }
        if cur.len() == by_dim.len() {
            return;
        }
        for i in from..s.len() {
            cur.push(s[i]);
            pick(s, i + 1, cur, by_dim);
            cur.pop();
        }
    }
    pick(s, 0, &mut Vec::new(), by_dim);
}

fn grow(
    relation: &Entourage,
    current: &mut Vec<u32>,
    cands: &PointSet,
    max_dim: usize,
    out: &mut [Vec<Vec<u32>>],
    cap: usize,
) -> Result<(), HomologyError> {
    let d = current.len() - 1;
    out[d].push(current.clone());
    if out[d].len() > cap {
        return Err(HomologyError::DegreeCapExceeded {
            degree: d,
            bound: out[d].len(),
            cap,
        });
    }
    if d == max_dim {
        return Ok(());
    }
    for w in cands.ones() {
        let mut next = cands.clone();
        next.intersect_with(relation.row(w));
        next.set_range(..w + 1, false);
        current.push(w as u32);
        grow(relation, current, &next, max_dim, out, cap)?;
        current.pop();
    }
    Ok(())
}

/// Clique complex of `closure_at(k)` through dimension `d_max + 1`.
pub fn rips_complex(
    space: &BornCoarseSpace,
    k: usize,
    d_max: usize,
    config: &EngineConfig,
) -> Result<SimplicialComplex, HomologyError> {
    SimplicialComplex::clique(&space.closure_at(k), d_max + 1, config.basis_cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(n: usize) -> Entourage {
        Entourage::full(n)
    }

    #[test]
    fn full_simplex_is_contractible() {
        let c = SimplicialComplex::clique(&full(5), 4, 1000).unwrap();
        assert_eq!(c.counts(), vec![5, 10, 10, 5, 1]);
        assert_eq!(c.betti(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn hollow_triangle() {
        let c = SimplicialComplex::from_faces(3, &[vec![0, 1], vec![1, 2], vec![0, 2]], 2);
        assert_eq!(c.betti(), vec![1, 1]);
        assert_eq!(c.dimension(), Some(1));
    }

    #[test]
    fn point_complex() {
        let c = SimplicialComplex::clique(&Entourage::diagonal(1), 1, 10).unwrap();
        assert_eq!(c.counts(), vec![1, 0]);
        assert_eq!(c.betti(), vec![1]);
    }
}
