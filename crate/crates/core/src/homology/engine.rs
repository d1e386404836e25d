use rayon::prelude::*;

use super::basis::{homology_matrix, HomologyBasis};
use super::chains::{ChainComplexAtScale, TupleBasis};
use super::groups::FGAbGroup;
use super::matrix::BigMatrix;
use super::sparse::SparseMatrix;
use super::{EngineConfig, HomologyError};
use crate::morphisms::{are_close, least_scale_containing, same_space, SpaceMap};
use crate::space::{BornCoarseSpace, Entourage};

/// Homology in degrees `0..=d_max` of the complex at `closure_at(k)`.
pub fn homology_at_scale(
    space: &BornCoarseSpace,
    k: usize,
    d_max: usize,
    config: &EngineConfig,
) -> Result<Vec<FGAbGroup>, HomologyError> {
    Ok(ChainComplexAtScale::build(space, k, d_max + 1, config)?.homology())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizationReport {
    pub stabilized_at: usize,
    /// Homology at each scale index up to stabilization, or the failure there.
    pub per_scale: Vec<(usize, Result<Vec<FGAbGroup>, HomologyError>)>,
    pub warnings: Vec<String>,
}

/// Homology at the stabilized closure, which is the colimit over scales for a
/// finite space.
///
/// The stabilized closure is an equivalence relation, so each class spans an
/// acyclic complex. When that complex exceeds the basis cap the value is taken
/// from this closed form and a warning is recorded.
pub fn homology_colimit(
    space: &BornCoarseSpace,
    d_max: usize,
    config: &EngineConfig,
) -> (Vec<FGAbGroup>, StabilizationReport) {
    let s = space.stabilized_at();
    let per_scale: Vec<(usize, Result<Vec<FGAbGroup>, HomologyError>)> = (0..=s)
        .into_par_iter()
        .map(|k| (k, homology_at_scale(space, k, d_max, config)))
        .collect();
    let mut warnings = Vec::new();
    if let Some(w) = space.window() {
        warnings.push(format!("window-relative result on {}", w.describe()));
    }
    let value = match &per_scale[s].1 {
        Ok(v) => v.clone(),
        Err(e) => {
            warnings.push(format!(
                "stabilized complex too large ({e}); value taken from the component count"
            ));
            let mut v = vec![FGAbGroup::zero(); d_max + 1];
            v[0] = FGAbGroup::free(space.coarse_components().len());
            v
        }
    };
    (
        value,
        StabilizationReport {
            stabilized_at: s,
            per_scale,
            warnings,
        },
    )
}

#[derive(Debug, Clone)]
pub struct InducedMap {
    pub source_scale: usize,
    pub target_scale: usize,
    pub degree: usize,
    /// Chain-level matrix on normalized tuple bases.
    pub chain: SparseMatrix,
    pub source_basis: HomologyBasis,
    pub target_basis: HomologyBasis,
    /// Matrix between homology groups in the two bases.
    pub homology: BigMatrix,
}

/// Map induced in degree `n` from scale `k_source` to the least scale of the
/// target containing the image of `closure_at(k_source)`.
pub fn induced_map(
    f: &SpaceMap,
    k_source: usize,
    n: usize,
    config: &EngineConfig,
) -> Result<InducedMap, HomologyError> {
    let src = f.source();
    let tgt = f.target();
    let k_target = least_scale_containing(tgt, &f.image_relation(&src.closure_at(k_source)))
        .ok_or(HomologyError::NotControlledAtScale { scale: k_source })?;
    induced_map_at(f, k_source, k_target, n, config)
}

/// As [`induced_map`] with an explicit target scale.
pub fn induced_map_at(
    f: &SpaceMap,
    k_source: usize,
    k_target: usize,
    n: usize,
    config: &EngineConfig,
) -> Result<InducedMap, HomologyError> {
    let (a, b) = rayon::join(
        || ChainComplexAtScale::build(f.source(), k_source, n + 1, config),
        || ChainComplexAtScale::build(f.target(), k_target, n + 1, config),
    );
    let (a, b) = (a?, b?);
    induced_between(&a, &b, f.table(), n)
}

pub(crate) fn induced_between(
    a: &ChainComplexAtScale,
    b: &ChainComplexAtScale,
    table: &[usize],
    n: usize,
) -> Result<InducedMap, HomologyError> {
    let chain = b.pushforward(a.basis(n), table)?;
    let (source_basis, target_basis) =
        rayon::join(|| HomologyBasis::of(a, n), || HomologyBasis::of(b, n));
    let homology = homology_matrix(&chain, &source_basis, &target_basis);
    Ok(InducedMap {
        source_scale: a.scale(),
        target_scale: b.scale(),
        degree: n,
        chain,
        source_basis,
        target_basis,
        homology,
    })
}

#[derive(Debug, Clone)]
pub struct PrismResult {
    pub source_scale: usize,
    pub target_scale: usize,
    /// `h[m] : C_m → C_(m+1)` for `m = 0..=n`.
    pub h: Vec<SparseMatrix>,
    /// Per degree, whether `∂h + h∂ = C(g) − C(f)` holds exactly.
    pub verified: Vec<bool>,
}

impl PrismResult {
    pub fn all_verified(&self) -> bool {
        self.verified.iter().all(|&v| v)
    }
}

fn prism_matrix(
    source: &TupleBasis,
    target: &ChainComplexAtScale,
    f: &[usize],
    g: &[usize],
) -> Result<SparseMatrix, HomologyError> {
    let m = source.degree();
    let rows = target.basis(m + 1).len();
    let cols = source
        .iter()
        .map(|t| {
            let mut col = Vec::new();
            for i in 0..=m {
                let img: Vec<u32> = t[..=i]
                    .iter()
                    .map(|&v| f[v as usize] as u32)
                    .chain(t[i..].iter().map(|&v| g[v as usize] as u32))
                    .collect();
                match target.locate(&img) {
                    Ok(Some(r)) => col.push((r as u32, if i % 2 == 0 { 1 } else { -1 })),
                    Ok(None) => {}
                    Err(()) => {
                        return Err(HomologyError::NotControlledAtScale {
                            scale: target.scale(),
                        })
                    }
                }
            }
            Ok(col)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SparseMatrix::from_columns(rows, cols))
}

/// Chain homotopy between `C(f)` and `C(g)` in degrees `0..=n`, with the
/// homotopy identity checked as exact integer matrices.
pub fn prism(
    f: &SpaceMap,
    g: &SpaceMap,
    k: usize,
    n: usize,
    config: &EngineConfig,
) -> Result<PrismResult, HomologyError> {
    if !same_space(f.source(), g.source()) || !same_space(f.target(), g.target()) {
        return Err(HomologyError::SourceTargetMismatch);
    }
    if are_close(f, g)
        .map_err(|_| HomologyError::SourceTargetMismatch)?
        .is_none()
    {
        return Err(HomologyError::NotClose);
    }
    let src = f.source();
    let tgt = f.target();
    let u = src.closure_at(k);
    let mut needed = Entourage::empty(tgt.len());
    for (x, y) in u.pairs() {
        let (fx, fy, gx, gy) = (f.apply(x), f.apply(y), g.apply(x), g.apply(y));
        needed.insert(fx, fy);
        needed.insert(gx, gy);
        needed.insert(fx, gy);
        needed.insert(gy, fx);
    }
    let k_target = least_scale_containing(tgt, &needed).ok_or(HomologyError::NotClose)?;
    let (a, b) = rayon::join(
        || ChainComplexAtScale::build(src, k, n, config),
        || ChainComplexAtScale::build(tgt, k_target, n + 1, config),
    );
    let (a, b) = (a?, b?);
    let h = (0..=n)
        .into_par_iter()
        .map(|m| prism_matrix(a.basis(m), &b, f.table(), g.table()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut verified = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let fm = b.pushforward(a.basis(m), f.table())?;
        let gm = b.pushforward(a.basis(m), g.table())?;
        let rhs = gm.sub(&fm);
        let lhs = b.boundary(m + 1).mul(&h[m]).and_then(|dh| {
            if m == 0 {
                Some(dh)
            } else {
                h[m - 1].mul(a.boundary(m)).and_then(|hd| dh.add(&hd))
            }
        });
        verified.push(matches!((lhs, rhs), (Some(l), Some(r)) if l == r));
    }
    Ok(PrismResult {
        source_scale: k,
        target_scale: k_target,
        h,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::space::BuiltinKind;

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    fn hexagon() -> Arc<BornCoarseSpace> {
        let ids: Vec<String> = (0..6).map(|i| i.to_string()).collect();
        let edges: Vec<(String, String)> =
            (0..6).map(|i| (i.to_string(), ((i + 1) % 6).to_string())).collect();
        Arc::new(BornCoarseSpace::explicit(&ids, &[edges], std::slice::from_ref(&ids)).unwrap())
    }

    fn point() -> Arc<BornCoarseSpace> {
        Arc::new(BornCoarseSpace::explicit(&["*"], &[], &[vec!["*"]]).unwrap())
    }

    #[test]
    fn point_and_full_relation() {
        let h = homology_at_scale(&point(), 0, 3, &cfg()).unwrap();
        assert_eq!(h[0], FGAbGroup::free(1));
        assert!(h[1..].iter().all(FGAbGroup::is_zero));
        let ids: Vec<String> = (0..4).map(|i| i.to_string()).collect();
        let all: Vec<(String, String)> = ids
            .iter()
            .flat_map(|a| ids.iter().map(move |b| (a.clone(), b.clone())))
            .collect();
        let full = BornCoarseSpace::explicit(&ids, &[all], std::slice::from_ref(&ids)).unwrap();
        let h = homology_at_scale(&full, 1, 3, &cfg()).unwrap();
        assert_eq!(h[0], FGAbGroup::free(1));
        assert!(h[1..].iter().all(FGAbGroup::is_zero));
    }

    #[test]
    fn hexagon_circle() {
        let h = homology_at_scale(&hexagon(), 1, 2, &cfg()).unwrap();
        assert_eq!(h, vec![FGAbGroup::free(1), FGAbGroup::free(1), FGAbGroup::zero()]);
    }

    #[test]
    fn colimit_counts_components() {
        let (h, rep) = homology_colimit(&hexagon(), 2, &cfg());
        assert_eq!(h[0], FGAbGroup::free(1));
        assert!(h[1..].iter().all(FGAbGroup::is_zero));
        assert_eq!(rep.per_scale.len(), rep.stabilized_at + 1);
        let empty = BornCoarseSpace::explicit::<&str>(&[], &[], &[]).unwrap();
        let (h, _) = homology_colimit(&empty, 2, &cfg());
        assert!(h.iter().all(FGAbGroup::is_zero));
    }

    #[test]
    fn induced_identity_and_collapse() {
        let x = hexagon();
        let id = induced_map(&SpaceMap::identity(x.clone()), 1, 1, &cfg()).unwrap();
        assert_eq!(id.homology, BigMatrix::identity(1));
        let c = SpaceMap::constant(x.clone(), point(), 0).unwrap();
        let m1 = induced_map(&c, 1, 1, &cfg()).unwrap();
        assert_eq!((m1.homology.rows(), m1.homology.cols()), (0, 1));
        let m0 = induced_map(&c, 1, 0, &cfg()).unwrap();
        assert_eq!(m0.homology.to_rows(), vec![vec![num_bigint::BigInt::from(1)]]);
    }

    #[test]
    fn prism_for_shift() {
        let x = Arc::new(BornCoarseSpace::windowed_builtin(BuiltinKind::HalfLine, 12).unwrap());
        let id = SpaceMap::identity(x.clone());
        let shift = SpaceMap::translate(x, &[1]).unwrap();
        let p = prism(&id, &shift, 1, 2, &cfg()).unwrap();
        assert!(p.all_verified());
        let same = prism(&id, &id, 1, 2, &cfg()).unwrap();
        assert!(same.all_verified());
    }

    #[test]
    fn prism_refuses_far_maps() {
        let two = Arc::new(BornCoarseSpace::explicit(&["a", "b"], &[], &[vec!["a", "b"]]).unwrap());
        let f = SpaceMap::constant(point(), two.clone(), 0).unwrap();
        let g = SpaceMap::constant(point(), two, 1).unwrap();
        assert!(matches!(prism(&f, &g, 0, 1, &cfg()), Err(HomologyError::NotClose)));
    }
}
