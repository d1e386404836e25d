//! Maps between spaces and their certification: controlled and proper checks,
//! closeness, coarse equivalence, flasqueness, cylinders and homotopies.

mod cylinder;
mod flasque;

use std::sync::Arc;

use thiserror::Error;

use crate::space::{BornCoarseSpace, Entourage, SpaceError};

pub use cylinder::{check_homotopy, cylinder, Cylinder, CylinderCaps};
pub use flasque::{
    certify_flasque, certify_flasque_generalized, default_tested_bounded, FlasqueCaps,
    FlasqueCertificate, FlasqueRefusal, GeneralizedFlasqueCertificate,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("map table has {got} entries for {expected} source points")]
    TableLength { got: usize, expected: usize },
    #[error("image index {0} lies outside the target")]
    ImageOutOfRange(usize),
    #[error("source point `{0}` is assigned more than once")]
    DuplicateAssignment(String),
    #[error("source point `{0}` has no image")]
    MissingAssignment(String),
    #[error("maps do not share source and target")]
    SourceTargetMismatch,
    #[error("translation needs a windowed space")]
    NotWindowed,
    #[error("p± is not controlled: jump {jump} across ({x}, {y}) exceeds cap {cap}")]
    PNotControlled { x: String, y: String, jump: i64, cap: i64 },
    #[error("p± is not bornological: |p(x)| = {value} at `{x}` exceeds cap {cap}")]
    PNotBornological { x: String, value: i64, cap: i64 },
    #[error("p₋ must be nonpositive and p₊ nonnegative at `{0}`")]
    PSign(String),
    #[error("homotopy does not start on the supplied cylinder")]
    CylinderMismatch,
}

/// A total function between the ground sets of two spaces.
#[derive(Debug, Clone)]
pub struct SpaceMap {
    source: Arc<BornCoarseSpace>,
    target: Arc<BornCoarseSpace>,
    table: Vec<usize>,
    /// Source points whose intended image fell outside a window and was clamped.
    clamped: Vec<usize>,
}

pub(crate) fn same_space(a: &Arc<BornCoarseSpace>, b: &Arc<BornCoarseSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl SpaceMap {
    pub fn new(
        source: Arc<BornCoarseSpace>,
        target: Arc<BornCoarseSpace>,
        table: Vec<usize>,
    ) -> Result<Self, MorphismError> {
        if table.len() != source.len() {
            return Err(MorphismError::TableLength {
                got: table.len(),
                expected: source.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= target.len()) {
            return Err(MorphismError::ImageOutOfRange(bad));
        }
        Ok(SpaceMap {
            source,
            target,
            table,
            clamped: Vec::new(),
        })
    }

    /// Builds a map from `(source id, target id)` assignments, one per source point.
    pub fn from_pairs<S: AsRef<str>>(
        source: Arc<BornCoarseSpace>,
        target: Arc<BornCoarseSpace>,
        pairs: &[(S, S)],
    ) -> Result<Self, MorphismError> {
        let mut table: Vec<Option<usize>> = vec![None; source.len()];
        for (a, b) in pairs {
            let x = source.ground().position(a.as_ref())?;
            let y = target.ground().position(b.as_ref())?;
            if table[x].replace(y).is_some() {
                return Err(MorphismError::DuplicateAssignment(a.as_ref().to_string()));
            }
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(x, y)| {
                y.ok_or_else(|| MorphismError::MissingAssignment(source.ground().id(x).into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(source, target, table)
    }

    pub fn identity(space: Arc<BornCoarseSpace>) -> Self {
        let table = (0..space.len()).collect();
        SpaceMap {
            source: space.clone(),
            target: space,
            table,
            clamped: Vec::new(),
        }
    }

    pub fn constant(
        source: Arc<BornCoarseSpace>,
        target: Arc<BornCoarseSpace>,
        point: usize,
    ) -> Result<Self, MorphismError> {
        let table = vec![point; source.len()];
        Self::new(source, target, table)
    }

    /// Translation of a windowed space by an ambient vector, clamping each
    /// coordinate into the window and recording every clamped point.
    pub fn translate(space: Arc<BornCoarseSpace>, offset: &[i64]) -> Result<Self, MorphismError> {
        let window = space.window().ok_or(MorphismError::NotWindowed)?.clone();
        let (lo, hi) = match window.kind {
            crate::space::BuiltinKind::HalfLine => (0, window.radius as i64),
            _ => (-(window.radius as i64), window.radius as i64),
        };
        let mut table = Vec::with_capacity(space.len());
        let mut clamped = Vec::new();
        for (x, c) in window.coords.iter().enumerate() {
            let moved: Vec<i64> = c.iter().zip(offset).map(|(a, b)| a + b).collect();
            let fixed: Vec<i64> = moved.iter().map(|v| (*v).clamp(lo, hi)).collect();
            if fixed != moved {
                clamped.push(x);
            }
            table.push(space.ground().position(&window.kind.point_id(&fixed))?);
        }
        Ok(SpaceMap {
            source: space.clone(),
            target: space,
            table,
            clamped,
        })
    }

    pub fn source(&self) -> &Arc<BornCoarseSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<BornCoarseSpace> {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn clamped(&self) -> &[usize] {
        &self.clamped
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &SpaceMap) -> Result<SpaceMap, MorphismError> {
        if !same_space(&self.target, &next.source) {
            return Err(MorphismError::SourceTargetMismatch);
        }
        let table = self.table.iter().map(|&y| next.table[y]).collect();
        let mut clamped: Vec<usize> = self.clamped.clone();
        clamped.extend((0..self.table.len()).filter(|&x| next.clamped.contains(&self.table[x])));
        clamped.sort_unstable();
        clamped.dedup();
        Ok(SpaceMap {
            source: self.source.clone(),
            target: next.target.clone(),
            table,
            clamped,
        })
    }

    /// `self^j` for an endomorphism; `j = 0` is the identity.
    pub fn power(&self, j: usize) -> Result<SpaceMap, MorphismError> {
        if !same_space(&self.source, &self.target) {
            return Err(MorphismError::SourceTargetMismatch);
        }
        let mut acc = SpaceMap::identity(self.source.clone());
        for _ in 0..j {
            acc = acc.then(self)?;
        }
        Ok(acc)
    }

    pub fn image_relation(&self, e: &Entourage) -> Entourage {
        e.image(&self.table, self.target.len())
    }

    /// Assignment list as identifiers, in source order.
    pub fn pairs(&self) -> Vec<(String, String)> {
        self.table
            .iter()
            .enumerate()
            .map(|(x, &y)| {
                (
                    self.source.ground().id(x).to_string(),
                    self.target.ground().id(y).to_string(),
                )
            })
            .collect()
    }
}

/// Outcome of checking that a map is controlled and proper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismReport {
    pub controlled: bool,
    /// Generator index and the source pair whose image escapes the stabilized target closure.
    pub controlled_witness: Option<(usize, usize, usize)>,
    pub proper: bool,
    /// Target bornology generator whose preimage is unbounded.
    pub proper_witness: Option<usize>,
    /// `scale_shift[k]` is the least `k'` with `(f×f)(closure_at(k)) ⊆ closure_at'(k')`,
    /// for `k` up to the source's stabilization index.
    pub scale_shift: Vec<Option<usize>>,
}

impl MorphismReport {
    pub fn is_morphism(&self) -> bool {
        self.controlled && self.proper
    }
}

/// Least `k'` with `e ⊆ closure_at'(k')`, searching up to stabilization.
pub(crate) fn least_scale_containing(target: &BornCoarseSpace, e: &Entourage) -> Option<usize> {
    let s = target.stabilized_at();
    (0..=s).find(|&k| e.is_subset(&target.closure_at(k)))
}

pub fn check_morphism(f: &SpaceMap) -> MorphismReport {
    let src = &f.source;
    let tgt = &f.target;
    let stab = tgt.stabilized_closure();
    let mut controlled_witness = None;
    'outer: for (gi, g) in src.generators().iter().enumerate() {
        for (x, y) in g.pairs() {
            if !stab.contains(f.table[x], f.table[y]) {
                controlled_witness = Some((gi, x, y));
                break 'outer;
            }
        }
    }
    let mut proper_witness = None;
    for (bi, b) in tgt.bornology().generators().iter().enumerate() {
        let mut pre = fixedbitset::FixedBitSet::with_capacity(src.len());
        for (x, &y) in f.table.iter().enumerate() {
            if b.contains(y) {
                pre.insert(x);
            }
        }
        if !src.is_bounded(&pre) {
            proper_witness = Some(bi);
            break;
        }
    }
    let scale_shift = (0..=src.stabilized_at())
        .map(|k| least_scale_containing(tgt, &f.image_relation(&src.closure_at(k))))
        .collect();
    MorphismReport {
        controlled: controlled_witness.is_none(),
        controlled_witness,
        proper: proper_witness.is_none(),
        proper_witness,
        scale_shift,
    }
}

/// `(f × g)(diag) = {(f(x), g(x))}`.
pub(crate) fn pair_relation(f: &SpaceMap, g: &SpaceMap) -> Entourage {
    Entourage::from_pairs(
        f.target.len(),
        (0..f.table.len()).map(|x| (f.table[x], g.table[x])),
    )
}

/// Least `k` with `(f × g)(diag) ⊆ closure_at'(k)`, or `None` if the maps are not close.
pub fn are_close(f: &SpaceMap, g: &SpaceMap) -> Result<Option<usize>, MorphismError> {
    if !same_space(&f.source, &g.source) || !same_space(&f.target, &g.target) {
        return Err(MorphismError::SourceTargetMismatch);
    }
    Ok(least_scale_containing(&f.target, &pair_relation(f, g)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    /// Closeness index of `g ∘ f` to the identity of the source.
    pub source_closeness: Option<usize>,
    /// Closeness index of `f ∘ g` to the identity of the target.
    pub target_closeness: Option<usize>,
    pub f_is_morphism: bool,
    pub g_is_morphism: bool,
}

pub fn check_equivalence(f: &SpaceMap, g: &SpaceMap) -> Result<EquivalenceReport, MorphismError> {
    let gf = f.then(g)?;
    let fg = g.then(f)?;
    let k1 = are_close(&gf, &SpaceMap::identity(f.source.clone()))?;
    let k2 = are_close(&fg, &SpaceMap::identity(f.target.clone()))?;
    let fm = check_morphism(f).is_morphism();
    let gm = check_morphism(g).is_morphism();
    Ok(EquivalenceReport {
        equivalent: fm && gm && k1.is_some() && k2.is_some(),
        source_closeness: k1,
        target_closeness: k2,
        f_is_morphism: fm,
        g_is_morphism: gm,
    })
}
