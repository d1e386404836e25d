use std::sync::Arc;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use super::{are_close, least_scale_containing, same_space, MorphismError, SpaceMap};
use crate::space::{BornCoarseSpace, BuiltinKind, Entourage, PointSet};

/// Limits for flasque certification.
#[derive(Debug, Clone)]
pub struct FlasqueCaps {
    /// Largest source scale index tested for uniform control of the iterates.
    pub scale_cap: usize,
    /// Largest iterate examined.
    pub iter_cap: usize,
    /// Bounded sets tested for the escape condition; `None` selects
    /// [`default_tested_bounded`].
    pub tested: Option<Vec<PointSet>>,
}

impl Default for FlasqueCaps {
    fn default() -> Self {
        FlasqueCaps {
            scale_cap: 4,
            iter_cap: 64,
            tested: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlasqueRefusal {
    #[error(transparent)]
    Map(#[from] MorphismError),
    #[error(
        "space is not windowed: a finite space is bounded, so no self-map can eventually \
         leave every bounded set"
    )]
    NotWindowed,
    #[error("map is not a self-map of the space")]
    NotEndomorphism,
    #[error("condition 1 fails: the map is not close to the identity")]
    NotCloseToIdentity,
    #[error("condition 2 fails at scale {scale}: iterates up to {iter_cap} are not uniformly controlled")]
    IteratesUncontrolled { scale: usize, iter_cap: usize },
    #[error("condition 3 fails: iterates up to {iter_cap} never leave tested bounded set {set}")]
    NeverLeaves { set: usize, iter_cap: usize },
    #[error("generalized condition 1 fails: the first map is not the identity")]
    FirstNotIdentity,
    #[error("generalized condition 2 fails: consecutive maps are not uniformly close")]
    ConsecutiveNotClose,
    #[error("generalized condition 4 fails: the supplied maps do not eventually leave tested bounded set {set}")]
    EventuallyMeets { set: usize },
    #[error("no maps supplied")]
    EmptySequence,
}

#[derive(Debug, Clone)]
pub struct FlasqueCertificate {
    pub map: SpaceMap,
    /// Window radius the certificate is relative to.
    pub window: u32,
    pub scale_cap: usize,
    pub iter_cap: usize,
    pub cond1_scale: usize,
    /// `(k, k')` pairs: the iterates up to `iter_cap` send `closure_at(k)` into `closure_at(k')`.
    pub cond2_table: Vec<(usize, usize)>,
    /// `(tested set, least j)` with `f^j(X) ∩ B = ∅`.
    pub cond3_table: Vec<(usize, usize)>,
    pub tested: Vec<PointSet>,
    /// Points whose image was clamped at the window edge.
    pub clamp_count: usize,
}

#[derive(Debug, Clone)]
pub struct GeneralizedFlasqueCertificate {
    pub window: u32,
    pub scale_cap: usize,
    /// Least scale containing every `(f_k × f_(k+1))(diag)` of the prefix.
    pub consecutive_scale: usize,
    pub control_table: Vec<(usize, usize)>,
    /// `(tested set, least k0)` with `f_k(X) ∩ B = ∅` for `k0 ≤ k` within the prefix.
    pub escape_table: Vec<(usize, usize)>,
    pub tested: Vec<PointSet>,
    pub clamp_count: usize,
}

/// Bornology generators lying within half the window radius of the origin.
/// Sets near the window edge are excluded because clamping pins iterates there.
pub fn default_tested_bounded(space: &BornCoarseSpace) -> Vec<PointSet> {
    let Some(w) = space.window() else {
        return Vec::new();
    };
    let half = (w.radius / 2) as i64;
    let inner = |x: usize| -> bool {
        let c = &w.coords[x];
        match w.kind {
            BuiltinKind::Grid2Window => c.iter().map(|v| v.abs()).sum::<i64>() <= half,
            _ => c.iter().all(|v| v.abs() <= half),
        }
    };
    space
        .bornology()
        .generators()
        .iter()
        .filter(|b| b.ones().all(inner))
        .cloned()
        .collect()
}

fn image_set(f: &SpaceMap) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(f.target().len());
    for &y in f.table() {
        s.insert(y);
    }
    s
}

fn window_of(space: &BornCoarseSpace) -> Result<u32, FlasqueRefusal> {
    space.window().map(|w| w.radius).ok_or(FlasqueRefusal::NotWindowed)
}

/// `(k, k')` for `k = 1..=scale_cap`: least `k'` containing every image of `closure_at(k)`.
fn control_table(
    space: &BornCoarseSpace,
    maps: &[SpaceMap],
    scale_cap: usize,
    iter_cap: usize,
) -> Result<Vec<(usize, usize)>, FlasqueRefusal> {
    let mut table = Vec::new();
    for k in 1..=scale_cap {
        let u = space.closure_at(k);
        let mut union = Entourage::empty(space.len());
        for m in maps {
            union.union_with(&m.image_relation(&u));
        }
        let kp = least_scale_containing(space, &union)
            .ok_or(FlasqueRefusal::IteratesUncontrolled { scale: k, iter_cap })?;
        table.push((k, kp));
    }
    Ok(table)
}

pub fn certify_flasque(f: &SpaceMap, caps: &FlasqueCaps) -> Result<FlasqueCertificate, FlasqueRefusal> {
    let space = f.source().clone();
    if !same_space(f.source(), f.target()) {
        return Err(FlasqueRefusal::NotEndomorphism);
    }
    let window = window_of(&space)?;
    let id = SpaceMap::identity(space.clone());
    let cond1_scale = are_close(f, &id)?.ok_or(FlasqueRefusal::NotCloseToIdentity)?;

    let iterates: Vec<SpaceMap> = (0..=caps.iter_cap)
        .map(|j| f.power(j))
        .collect::<Result<_, _>>()?;
    let cond2_table = control_table(&space, &iterates, caps.scale_cap, caps.iter_cap)?;

    let tested = caps.tested.clone().unwrap_or_else(|| default_tested_bounded(&space));
    let images: Vec<FixedBitSet> = iterates.iter().map(image_set).collect();
    let mut cond3_table = Vec::new();
    for (bi, b) in tested.iter().enumerate() {
        let j = images
            .iter()
            .position(|img| img.is_disjoint(b))
            .ok_or(FlasqueRefusal::NeverLeaves {
                set: bi,
                iter_cap: caps.iter_cap,
            })?;
        cond3_table.push((bi, j));
    }
    Ok(FlasqueCertificate {
        map: f.clone(),
        window,
        scale_cap: caps.scale_cap,
        iter_cap: caps.iter_cap,
        cond1_scale,
        cond2_table,
        cond3_table,
        tested,
        clamp_count: f.clamped().len(),
    })
}

/// Checks the four conditions on the supplied prefix `f_0, …, f_L`.
pub fn certify_flasque_generalized(
    maps: &[SpaceMap],
    caps: &FlasqueCaps,
) -> Result<GeneralizedFlasqueCertificate, FlasqueRefusal> {
    let first = maps.first().ok_or(FlasqueRefusal::EmptySequence)?;
    let space: Arc<BornCoarseSpace> = first.source().clone();
    for m in maps {
        if !same_space(m.source(), &space) || !same_space(m.target(), &space) {
            return Err(FlasqueRefusal::NotEndomorphism);
        }
    }
    let window = window_of(&space)?;
    if first.table().iter().enumerate().any(|(x, &y)| x != y) {
        return Err(FlasqueRefusal::FirstNotIdentity);
    }
    let mut consecutive = Entourage::diagonal(space.len());
    for w in maps.windows(2) {
        for x in 0..space.len() {
            consecutive.insert(w[0].apply(x), w[1].apply(x));
        }
    }
    let consecutive_scale =
        least_scale_containing(&space, &consecutive).ok_or(FlasqueRefusal::ConsecutiveNotClose)?;
    let control_table = control_table(&space, maps, caps.scale_cap, maps.len() - 1)?;

    let tested = caps.tested.clone().unwrap_or_else(|| default_tested_bounded(&space));
    let images: Vec<FixedBitSet> = maps.iter().map(image_set).collect();
    let mut escape_table = Vec::new();
    for (bi, b) in tested.iter().enumerate() {
        // Least k0 such that every later map in the prefix misses B.
        let mut k0 = images.len();
        while k0 > 0 && images[k0 - 1].is_disjoint(b) {
            k0 -= 1;
        }
        if k0 == images.len() {
            return Err(FlasqueRefusal::EventuallyMeets { set: bi });
        }
        escape_table.push((bi, k0));
    }
    let mut clamped: Vec<usize> = maps.iter().flat_map(|m| m.clamped().iter().copied()).collect();
    clamped.sort_unstable();
    clamped.dedup();
    Ok(GeneralizedFlasqueCertificate {
        window,
        scale_cap: caps.scale_cap,
        consecutive_scale,
        control_table,
        escape_table,
        tested,
        clamp_count: clamped.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_line(n: u32) -> Arc<BornCoarseSpace> {
        Arc::new(BornCoarseSpace::windowed_builtin(BuiltinKind::HalfLine, n).unwrap())
    }

    #[test]
    fn shift_on_half_line_is_certified() {
        let x = half_line(100);
        let f = SpaceMap::translate(x.clone(), &[1]).unwrap();
        let cert = certify_flasque(&f, &FlasqueCaps::default()).unwrap();
        assert_eq!(cert.cond1_scale, 1);
        assert_eq!(cert.tested.len(), 51);
        for &(bi, j) in &cert.cond3_table {
            assert_eq!(j, bi + 1);
        }
        for &(k, kp) in &cert.cond2_table {
            assert_eq!(k, kp);
        }
        assert_eq!(cert.clamp_count, 1);
    }

    #[test]
    fn finite_space_is_refused() {
        let x = Arc::new(
            BornCoarseSpace::explicit(&["a", "b", "c"], &[vec![("a", "b")]], &[vec!["a", "b", "c"]])
                .unwrap(),
        );
        let f = SpaceMap::identity(x);
        assert_eq!(
            certify_flasque(&f, &FlasqueCaps::default()).unwrap_err(),
            FlasqueRefusal::NotWindowed
        );
    }

    #[test]
    fn identity_fails_escape() {
        let x = half_line(100);
        let err = certify_flasque(&SpaceMap::identity(x), &FlasqueCaps::default()).unwrap_err();
        assert!(matches!(err, FlasqueRefusal::NeverLeaves { set: 0, .. }));
    }

    #[test]
    fn generalized_reduces_to_powers() {
        let x = half_line(100);
        let f = SpaceMap::translate(x, &[1]).unwrap();
        let maps: Vec<SpaceMap> = (0..=64).map(|j| f.power(j).unwrap()).collect();
        let cert = certify_flasque_generalized(&maps, &FlasqueCaps::default()).unwrap();
        assert_eq!(cert.consecutive_scale, 1);
        assert_eq!(cert.escape_table[10], (10, 11));
    }

    #[test]
    fn generalized_constant_identity_fails() {
        let x = half_line(20);
        let maps = vec![SpaceMap::identity(x); 5];
        let err = certify_flasque_generalized(&maps, &FlasqueCaps::default()).unwrap_err();
        assert!(matches!(err, FlasqueRefusal::EventuallyMeets { set: 0 }));
    }
}
