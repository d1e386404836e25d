use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;

use super::groups::FGAbGroup;
use super::sparse::{self, SparseMatrix};
use super::{EngineConfig, HomologyError};
use crate::space::{BornCoarseSpace, Entourage, PointSet};

/// An ordered tuple of point indices.
pub type Tuple = Vec<usize>;

/// Lexicographically sorted tuples of a fixed width, stored flat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleBasis {
    width: usize,
    flat: Vec<u32>,
}

impl TupleBasis {
    pub fn degree(&self) -> usize {
        self.width - 1
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.flat[i * self.width..(i + 1) * self.width]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.flat.chunks_exact(self.width)
    }

    pub fn index_of(&self, t: &[u32]) -> Option<usize> {
        if t.len() != self.width {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(t) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn tuples(&self) -> Vec<Tuple> {
        self.iter()
            .map(|t| t.iter().map(|&v| v as usize).collect())
            .collect()
    }
}

pub(crate) fn is_degenerate(t: &[u32]) -> bool {
    t.windows(2).any(|w| w[0] == w[1])
}

/// Which tuples of a relation form the basis of a complex.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TupleFilter<'a> {
    /// Every entry must lie here.
    pub support: Option<&'a PointSet>,
    /// Tuples lying entirely here are zero in the quotient.
    pub quotient: Option<&'a PointSet>,
}

impl TupleFilter<'_> {
    pub const ALL: TupleFilter<'static> = TupleFilter {
        support: None,
        quotient: None,
    };

    fn in_quotient(&self, t: &[u32]) -> bool {
        match self.quotient {
            Some(q) => t.iter().all(|&v| q.contains(v as usize)),
            None => false,
        }
    }
}

/// Nondegenerate tuples of width `n + 1` whose entries are pairwise related,
/// in lexicographic order. Fails once more than `cap` tuples are found.
pub(crate) fn enumerate(
    relation: &Entourage,
    n: usize,
    filter: TupleFilter<'_>,
    cap: usize,
) -> Result<TupleBasis, HomologyError> {
    let size = relation.size();
    let mut start = PointSet::with_capacity(size);
    match filter.support {
        Some(s) => start.union_with(s),
        None => start.insert_range(..),
    }
    let count = AtomicUsize::new(0);
    let overflow = AtomicBool::new(false);
    let firsts: Vec<usize> = start.ones().collect();
    let chunks: Vec<Vec<u32>> = firsts
        .par_iter()
        .map(|&x0| {
            let mut out = Vec::new();
            let mut path = vec![x0 as u32];
            let mut cands = vec![{
                let mut c = start.clone();
                c.intersect_with(relation.row(x0));
                c
            }];
            extend(relation, n, &filter, &mut path, &mut cands, &mut out, &count, &overflow, cap);
            out
        })
        .collect();
    if overflow.load(AtomicOrdering::Relaxed) {
        return Err(HomologyError::DegreeCapExceeded {
            degree: n,
            bound: count.load(AtomicOrdering::Relaxed),
            cap,
        });
    }
    Ok(TupleBasis {
        width: n + 1,
        flat: chunks.concat(),
    })
}

#[allow(clippy::too_many_arguments)]
fn extend(
    relation: &Entourage,
    n: usize,
    filter: &TupleFilter<'_>,
    path: &mut Vec<u32>,
    cands: &mut Vec<PointSet>,
    out: &mut Vec<u32>,
    count: &AtomicUsize,
    overflow: &AtomicBool,
    cap: usize,
) {
    if overflow.load(AtomicOrdering::Relaxed) {
        return;
    }
    if path.len() == n + 1 {
        if !filter.in_quotient(path) {
            out.extend_from_slice(path);
            if count.fetch_add(1, AtomicOrdering::Relaxed) + 1 > cap {
                overflow.store(true, AtomicOrdering::Relaxed);
            }
        }
        return;
    }
    let last = *path.last().expect("path is nonempty") as usize;
    let here: Vec<usize> = cands.last().expect("candidates track the path").ones().collect();
    for y in here {
        if y == last {
            continue;
        }
        let mut next = cands.last().expect("candidates track the path").clone();
        next.intersect_with(relation.row(y));
        path.push(y as u32);
        cands.push(next);
        extend(relation, n, filter, path, cands, out, count, overflow, cap);
        cands.pop();
        path.pop();
    }
}

/// Normalized controlled chains of one space at one scale, optionally
/// restricted to a support set and taken modulo a subcomplex.
#[derive(Debug, Clone)]
pub struct ChainComplexAtScale {
    scale: usize,
    bases: Vec<TupleBasis>,
    boundaries: Vec<SparseMatrix>,
    quotient: Option<PointSet>,
}

impl ChainComplexAtScale {
    /// Complex of `X` at `closure_at(k)` in degrees `0..=top`.
    pub fn build(
        space: &BornCoarseSpace,
        k: usize,
        top: usize,
        config: &EngineConfig,
    ) -> Result<Self, HomologyError> {
        Self::build_filtered(&space.closure_at(k), k, top, TupleFilter::ALL, config)
    }

    /// `C(relation restricted to support) / C(quotient)`.
    pub(crate) fn build_filtered(
        relation: &Entourage,
        scale: usize,
        top: usize,
        filter: TupleFilter<'_>,
        config: &EngineConfig,
    ) -> Result<Self, HomologyError> {
        let bases = (0..=top)
            .into_par_iter()
            .map(|n| enumerate(relation, n, filter, config.basis_cap))
            .collect::<Result<Vec<_>, _>>()?;
        let boundaries = (0..=top)
            .into_par_iter()
            .map(|n| boundary_of(&bases, n, &filter))
            .collect();
        Ok(ChainComplexAtScale {
            scale,
            bases,
            boundaries,
            quotient: filter.quotient.cloned(),
        })
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn top_degree(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn basis(&self, n: usize) -> &TupleBasis {
        &self.bases[n]
    }

    /// `∂_n : C_n → C_(n-1)`; `∂_0` has no rows.
    pub fn boundary(&self, n: usize) -> &SparseMatrix {
        &self.boundaries[n]
    }

    /// Whether every composite `∂_n ∘ ∂_(n+1)` vanishes exactly.
    pub fn boundary_squares_vanish(&self) -> bool {
        (1..self.boundaries.len()).all(|n| {
            self.boundaries[n - 1]
                .mul(&self.boundaries[n])
                .is_some_and(|m| m.is_zero())
        })
    }

    /// Homology in degrees `0..top`; the top degree lacks its incoming boundary.
    pub fn homology(&self) -> Vec<FGAbGroup> {
        let top = self.top_degree();
        let factors: Vec<Vec<num_bigint::BigInt>> = (0..=top)
            .into_par_iter()
            .map(|n| sparse::invariant_factors(&self.boundaries[n]))
            .collect();
        (0..top)
            .map(|n| FGAbGroup::from_ranks(self.bases[n].len(), &factors[n], &factors[n + 1]))
            .collect()
    }

    /// Index of the basis tuple representing `t`, or `Ok(None)` if `t` is zero
    /// in this complex.
    pub(crate) fn locate(&self, t: &[u32]) -> Result<Option<usize>, ()> {
        if is_degenerate(t) {
            return Ok(None);
        }
        if let Some(q) = &self.quotient {
            if t.iter().all(|&v| q.contains(v as usize)) {
                return Ok(None);
            }
        }
        self.bases[t.len() - 1].index_of(t).map(Some).ok_or(())
    }

    /// Matrix of the chain map induced by a point map from `basis` into degree
    /// `basis.degree()` of `self`.
    pub(crate) fn pushforward(
        &self,
        basis: &TupleBasis,
        table: &[usize],
    ) -> Result<SparseMatrix, HomologyError> {
        let n = basis.degree();
        let rows = self.bases[n].len();
        let cols = basis
            .iter()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|t| {
                let img: Vec<u32> = t.iter().map(|&v| table[v as usize] as u32).collect();
                match self.locate(&img) {
                    Ok(Some(i)) => Ok(vec![(i as u32, 1)]),
                    Ok(None) => Ok(Vec::new()),
                    Err(()) => Err(HomologyError::NotControlledAtScale { scale: self.scale }),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SparseMatrix::from_columns(rows, cols))
    }
}

fn boundary_of(bases: &[TupleBasis], n: usize, filter: &TupleFilter<'_>) -> SparseMatrix {
    if n == 0 {
        return SparseMatrix::zeros(0, bases[0].len());
    }
    let lower = &bases[n - 1];
    let cols = (0..bases[n].len())
        .into_par_iter()
        .map(|j| {
            let t = bases[n].get(j);
            let mut col = Vec::with_capacity(n + 1);
            let mut face = Vec::with_capacity(n);
            for i in 0..=n {
                if i > 0 && i < n && t[i - 1] == t[i + 1] {
                    continue;
                }
                face.clear();
                face.extend(t.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &v)| v));
                if filter.in_quotient(&face) {
                    continue;
                }
                let idx = lower.index_of(&face).expect("faces of controlled tuples are controlled");
                col.push((idx as u32, if i % 2 == 0 { 1 } else { -1 }));
            }
            col
        })
        .collect();
    SparseMatrix::from_columns(lower.len(), cols)
}

/// All nondegenerate `closure_at(k)`-controlled tuples of degree `n`, lexicographically.
pub fn controlled_tuples(
    space: &BornCoarseSpace,
    k: usize,
    n: usize,
    config: &EngineConfig,
) -> Result<Vec<Tuple>, HomologyError> {
    Ok(enumerate(&space.closure_at(k), n, TupleFilter::ALL, config.basis_cap)?.tuples())
}

/// `∂_n` on the normalized basis at scale `k`.
pub fn boundary_matrix(
    space: &BornCoarseSpace,
    k: usize,
    n: usize,
    config: &EngineConfig,
) -> Result<SparseMatrix, HomologyError> {
    let relation = space.closure_at(k);
    let lo = n.saturating_sub(1);
    let bases = (lo..=n)
        .map(|d| enumerate(&relation, d, TupleFilter::ALL, config.basis_cap))
        .collect::<Result<Vec<_>, _>>()?;
    if n == 0 {
        return Ok(SparseMatrix::zeros(0, bases[0].len()));
    }
    let mut padded = vec![
        TupleBasis {
            width: 1,
            flat: Vec::new()
        };
        lo
    ];
    padded.extend(bases);
    Ok(boundary_of(&padded, n, &TupleFilter::ALL))
}
