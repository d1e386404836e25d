use std::collections::BTreeSet;

use super::cover::{ball_cover, greedy_net, is_lebesgue, least_bound, Cover};
use super::CoarsifyError;
use crate::homology::{EngineConfig, FGAbGroup, HomologyError, SimplicialComplex};
use crate::space::BornCoarseSpace;

/// Nerve of a cover through dimension `max_dim`: index sets whose members
/// share a point. A set of indices is a simplex exactly when it lies in the
/// star of some point, so stars generate the complex.
pub fn nerve(cover: &Cover, max_dim: usize, config: &EngineConfig) -> Result<SimplicialComplex, HomologyError> {
    let n = cover.members.first().map_or(0, |m| m.len());
    let mut stars: BTreeSet<Vec<u32>> = BTreeSet::new();
    for x in 0..n {
        let star: Vec<u32> = cover
            .members
            .iter()
            .enumerate()
            .filter(|(_, m)| m.contains(x))
            .map(|(i, _)| i as u32)
            .collect();
        if !star.is_empty() {
            stars.insert(star);
        }
    }
    let faces: Vec<Vec<u32>> = stars.into_iter().collect();
    let complex = SimplicialComplex::from_faces(cover.members.len(), &faces, max_dim);
    for (d, count) in complex.counts().into_iter().enumerate() {
        if count > config.basis_cap {
            return Err(HomologyError::DegreeCapExceeded {
                degree: d,
                bound: count,
                cap: config.basis_cap,
            });
        }
    }
    Ok(complex)
}

/// A finite prefix `𝒱_0, …, 𝒱_m` of an anti-Čech system of ball covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntiCechPrefix {
    pub scales: Vec<usize>,
    pub covers: Vec<Cover>,
    /// `certificates[i]`: the least bound of `𝒱_i`, verified Lebesgue for `𝒱_(i+1)`.
    pub certificates: Vec<usize>,
    /// `refinements[i][j]`: least index of a member of `𝒱_(i+1)` containing member `j` of `𝒱_i`.
    pub refinements: Vec<Vec<usize>>,
}

pub fn anti_cech(space: &BornCoarseSpace, scales: &[usize]) -> Result<AntiCechPrefix, CoarsifyError> {
    if scales.is_empty() {
        return Err(CoarsifyError::EmptyScales);
    }
    let covers: Vec<Cover> = scales
        .iter()
        .map(|&k| ball_cover(space, &greedy_net(space, k), k))
        .collect();
    let mut certificates = Vec::new();
    let mut refinements = Vec::new();
    for i in 0..covers.len().saturating_sub(1) {
        if scales[i + 1] <= scales[i] {
            return Err(CoarsifyError::CertificateFailed(i));
        }
        let bound = least_bound(space, &covers[i].members).ok_or(CoarsifyError::CertificateFailed(i))?;
        if !is_lebesgue(space, &covers[i + 1].members, bound).0 {
            return Err(CoarsifyError::CertificateFailed(i));
        }
        let kappa = covers[i]
            .members
            .iter()
            .map(|v| {
                covers[i + 1]
                    .members
                    .iter()
                    .position(|w| v.is_subset(w))
                    .ok_or(CoarsifyError::CertificateFailed(i))
            })
            .collect::<Result<Vec<_>, _>>()?;
        certificates.push(bound);
        refinements.push(kappa);
    }
    Ok(AntiCechPrefix {
        scales: scales.to_vec(),
        covers,
        certificates,
        refinements,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Telescope {
    /// `offsets[i]` is the first vertex of slice `i`; vertex `offsets[i] + j` is `(i, j)`.
    pub offsets: Vec<usize>,
    pub complex: SimplicialComplex,
    pub homology: Vec<FGAbGroup>,
}

/// Mapping telescope of the nerves along the refinement maps. Each prism
/// `σ × [i, i+1]` on `σ = (v_0 < … < v_n)` is cut into the simplices
/// `{(i, v_0), …, (i, v_t), (i+1, κ(v_t)), …, (i+1, κ(v_n))}`.
pub fn coarsening_space(
    prefix: &AntiCechPrefix,
    d_max: usize,
    config: &EngineConfig,
) -> Result<Telescope, HomologyError> {
    let top = d_max + 1;
    let nerves = prefix
        .covers
        .iter()
        .map(|c| nerve(c, top, config))
        .collect::<Result<Vec<_>, _>>()?;
    let mut offsets = Vec::with_capacity(nerves.len());
    let mut total = 0;
    for c in &prefix.covers {
        offsets.push(total);
        total += c.len();
    }
    let mut faces: Vec<Vec<u32>> = Vec::new();
    for (i, nv) in nerves.iter().enumerate() {
        let lift = |j: u32, slice: usize| (offsets[slice] + j as usize) as u32;
        for d in 0..=top {
            for s in nv.simplices(d) {
                faces.push(s.iter().map(|&v| lift(v, i)).collect());
                if i + 1 < nerves.len() {
                    let kappa = &prefix.refinements[i];
                    for t in 0..s.len() {
                        let mut piece: Vec<u32> = s[..=t].iter().map(|&v| lift(v, i)).collect();
                        piece.extend(s[t..].iter().map(|&v| lift(kappa[v as usize] as u32, i + 1)));
                        faces.push(piece);
                    }
                }
            }
        }
    }
    let complex = SimplicialComplex::from_faces(total, &faces, top);
    for (d, count) in complex.counts().into_iter().enumerate() {
        if count > config.basis_cap {
            return Err(HomologyError::DegreeCapExceeded {
                degree: d,
                bound: count,
                cap: config.basis_cap,
            });
        }
    }
    let homology = complex.homology();
    Ok(Telescope {
        offsets,
        complex,
        homology,
    })
}
