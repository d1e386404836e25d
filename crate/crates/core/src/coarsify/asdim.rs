use rayon::prelude::*;

use super::cover::{greedy_net_ordered, is_lebesgue, Cover};
use crate::space::{BornCoarseSpace, PointSet};

pub const DEFAULT_BUDGET: usize = 64;

pub const HEURISTIC_NOTE: &str = "heuristic search over ball covers on a finite window; \
the value is an upper-bound estimate only and certifies nothing about the ambient space";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsdimScale {
    pub scale: usize,
    /// Least nerve dimension among accepted candidates.
    pub dimension: Option<usize>,
    /// `(net scale, ball radius, scan offset)` of the best candidate.
    pub witness: Option<(usize, usize, usize)>,
    pub tried: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsdimReport {
    pub per_scale: Vec<AsdimScale>,
    /// Maximum over scales of the best dimension found, when every scale found one.
    pub upper_bound: Option<usize>,
    pub note: &'static str,
}

fn candidates(k: usize, n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    let grid: Vec<(usize, usize)> = (k..=2 * k + 1)
        .flat_map(|s| (s..=s + k).map(move |r| (s, r)))
        .collect();
    (0..n.max(1)).flat_map(move |o| grid.clone().into_iter().map(move |(s, r)| (s, r, o)))
}

/// For each scale `k`, searches ball covers around greedy nets (net scale
/// `s ∈ [k, 2k+1]`, radius `r ∈ [s, s+k]`, rotated scan orders) that have
/// `closure_at(k)` as a Lebesgue scale, keeping the least nerve dimension.
pub fn asdim_upper_bound(space: &BornCoarseSpace, scales: &[usize], budget: usize) -> AsdimReport {
    let n = space.len();
    let per_scale: Vec<AsdimScale> = scales
        .par_iter()
        .map(|&k| {
            let mut best: Option<(usize, (usize, usize, usize))> = None;
            let mut tried = 0;
            for (s, r, o) in candidates(k, n).take(budget) {
                tried += 1;
                let order: Vec<usize> = (o..n).chain(0..o).collect();
                let net = greedy_net_ordered(space, s, &order);
                let u = space.closure_at(r);
                let members: Vec<PointSet> = net.ones().map(|d| u.row(d).clone()).collect();
                if !is_lebesgue(space, &members, k).0 {
                    continue;
                }
                let cover = Cover {
                    members,
                    bound_scale: None,
                    lebesgue_scale: Some(k),
                    lebesgue_method: None,
                };
                let dim = cover.nerve_dimension().unwrap_or(0);
                if best.is_none_or(|(b, _)| dim < b) {
                    best = Some((dim, (s, r, o)));
                }
                if dim == 0 {
                    break;
                }
            }
            AsdimScale {
                scale: k,
                dimension: best.map(|b| b.0),
                witness: best.map(|b| b.1),
                tried,
            }
        })
        .collect();
    let upper_bound = per_scale
        .iter()
        .map(|s| s.dimension)
        .collect::<Option<Vec<_>>>()
        .map(|v| v.into_iter().max().unwrap_or(0));
    AsdimReport {
        per_scale,
        upper_bound,
        note: HEURISTIC_NOTE,
    }
}
