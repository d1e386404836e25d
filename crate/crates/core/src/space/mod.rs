//! Finite and windowed bornological coarse spaces.
//!
//! A space is a canonically ordered ground set, a coarse structure given by
//! generating entourages, and a bornology given by generating subsets. The
//! coarse structure is exposed through the chain of closures
//! `closure_at(0) ⊆ closure_at(1) ⊆ …`, where `closure_at(k)` is the `k`-fold
//! composite of the reflexive symmetric hull of the generators. For finite
//! ground sets the chain stabilizes and exhausts the generated structure.

mod builtin;
mod constructions;
mod entourage;
mod family;
mod metric;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use builtin::BuiltinKind;
pub use constructions::{coproduct, free_union, mixed_union, product_p, semidirect, subspace};
pub use entourage::{point_set, Entourage, PointSet};
pub use family::{BigFamilyPrefix, NotNested};
pub use metric::{parse_rational, Metric, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("bornology generators do not cover point `{0}`")]
    BornologyDoesNotCover(String),
    #[error(
        "coarse structure and bornology are incompatible: the scale-1 thickening of bornology \
         generator {generator} reaches `{escaping}`, which lies in no bounded set"
    )]
    IncompatibleStructures { generator: usize, escaping: String },
    #[error("distance matrix is not symmetric at ({0}, {1})")]
    NonSymmetricMatrix(String, String),
    #[error("negative distance between `{0}` and `{1}`")]
    NegativeDistance(String, String),
    #[error("nonzero self-distance at `{0}`")]
    NonzeroDiagonal(String),
    #[error("distance matrix has {rows} rows for {points} points")]
    MatrixShape { rows: usize, points: usize },
    #[error("scales must be positive and strictly increasing")]
    BadScales,
    #[error("window radius must be at least 1")]
    InvalidRadius,
}

/// The canonically ordered underlying set. Identifiers are opaque strings;
/// the declaration order is the total order used for every tie-break.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl GroundSet {
    pub fn new<S: Into<String>>(ids: impl IntoIterator<Item = S>) -> Result<Self, SpaceError> {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(SpaceError::DuplicatePoint(id.clone()));
            }
        }
        Ok(GroundSet { ids, index })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn position(&self, id: &str) -> Result<usize, SpaceError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| SpaceError::UnknownPoint(id.to_string()))
    }

    pub fn subset<S: AsRef<str>>(&self, ids: &[S]) -> Result<PointSet, SpaceError> {
        let mut s = FixedBitSet::with_capacity(self.len());
        for id in ids {
            s.insert(self.position(id.as_ref())?);
        }
        Ok(s)
    }

    pub fn all(&self) -> PointSet {
        let mut s = FixedBitSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    pub fn names(&self, set: &PointSet) -> Vec<String> {
        set.ones().map(|i| self.ids[i].clone()).collect()
    }
}

#[derive(Debug, Default)]
struct ClosureCache {
    closures: Vec<Arc<Entourage>>,
    stabilized_at: Option<usize>,
}

/// Generators plus the memoized closure filtration.
#[derive(Debug)]
pub struct CoarseStructure {
    generators: Vec<Entourage>,
    cache: RwLock<ClosureCache>,
}

impl Clone for CoarseStructure {
    fn clone(&self) -> Self {
        CoarseStructure::new(self.generators.clone())
    }
}

impl PartialEq for CoarseStructure {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}

impl CoarseStructure {
    pub fn new(generators: Vec<Entourage>) -> Self {
        CoarseStructure {
            generators,
            cache: RwLock::new(ClosureCache::default()),
        }
    }

    pub fn generators(&self) -> &[Entourage] {
        &self.generators
    }

    fn step_relation(&self, n: usize) -> Entourage {
        let mut r = Entourage::diagonal(n);
        for g in &self.generators {
            r.union_with(g);
            r.union_with(&g.inverse());
        }
        r
    }

    fn closure_at(&self, n: usize, k: usize) -> Arc<Entourage> {
        {
            let cache = self.cache.read().expect("closure cache poisoned");
            if let Some(s) = cache.stabilized_at {
                return cache.closures[k.min(s)].clone();
            }
            if let Some(c) = cache.closures.get(k) {
                return c.clone();
            }
        }
        let mut cache = self.cache.write().expect("closure cache poisoned");
        if cache.closures.is_empty() {
            cache.closures.push(Arc::new(Entourage::diagonal(n)));
        }
        let step = self.step_relation(n);
        while cache.closures.len() <= k && cache.stabilized_at.is_none() {
            let last = cache.closures.last().unwrap().clone();
            let next = last.compose(&step);
            if next == *last {
                cache.stabilized_at = Some(cache.closures.len() - 1);
            } else {
                cache.closures.push(Arc::new(next));
            }
        }
        match cache.stabilized_at {
            Some(s) => cache.closures[k.min(s)].clone(),
            None => cache.closures[k].clone(),
        }
    }

    fn stabilized_at(&self, n: usize) -> usize {
        // The closure chain of a finite relation strictly grows until it stops.
        let bound = n.max(1);
        let _ = self.closure_at(n, bound + 1);
        self.cache
            .read()
            .expect("closure cache poisoned")
            .stabilized_at
            .expect("closure chain stabilizes on finite sets")
    }
}

/// A bornology given by generators; a set is bounded iff it lies in a finite
/// union of generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bornology {
    generators: Vec<PointSet>,
}

impl Bornology {
    pub fn new(generators: Vec<PointSet>) -> Self {
        Bornology { generators }
    }

    pub fn generators(&self) -> &[PointSet] {
        &self.generators
    }

    fn union(&self, n: usize) -> PointSet {
        let mut u = FixedBitSet::with_capacity(n);
        for g in &self.generators {
            u.union_with(g);
        }
        u
    }

    pub fn is_bounded(&self, set: &PointSet) -> bool {
        set.is_subset(&self.union(set.len()))
    }
}

/// Names the ambient infinite space a finite window was cut from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowTag {
    pub kind: BuiltinKind,
    pub radius: u32,
    /// Integer coordinates of each point in the ambient space.
    pub coords: Vec<Vec<i64>>,
}

impl WindowTag {
    pub fn describe(&self) -> String {
        format!("{}({})", self.kind.name(), self.radius)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BornCoarseSpace {
    ground: GroundSet,
    coarse: CoarseStructure,
    bornology: Bornology,
    metric: Option<Metric>,
    window: Option<WindowTag>,
}

impl BornCoarseSpace {
    /// Assembles a space from parts and verifies compatibility at scale 1
    /// followed by the covering condition of the bornology.
    pub fn from_parts(
        ground: GroundSet,
        generators: Vec<Entourage>,
        bornology: Vec<PointSet>,
    ) -> Result<Self, SpaceError> {
        let space = BornCoarseSpace {
            ground,
            coarse: CoarseStructure::new(generators),
            bornology: Bornology::new(bornology),
            metric: None,
            window: None,
        };
        space.verify_compatibility(1)?;
        let union = space.bornology.union(space.len());
        if let Some(missing) = space.ground.all().difference(&union).next() {
            return Err(SpaceError::BornologyDoesNotCover(
                space.ground.id(missing).to_string(),
            ));
        }
        Ok(space)
    }

    pub(crate) fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = Some(metric);
        self
    }

    pub(crate) fn with_window(mut self, window: WindowTag) -> Self {
        self.window = Some(window);
        self
    }

    /// Every controlled thickening of a bounded generator must stay bounded.
    pub fn verify_compatibility(&self, k: usize) -> Result<(), SpaceError> {
        let u = self.closure_at(k);
        let union = self.bornology.union(self.len());
        for (gi, b) in self.bornology.generators.iter().enumerate() {
            let thick = u.thicken(b);
            if let Some(x) = thick.difference(&union).next() {
                return Err(SpaceError::IncompatibleStructures {
                    generator: gi,
                    escaping: self.ground.id(x).to_string(),
                });
            }
        }
        Ok(())
    }

    /// Space with coarse structure generated by the listed pair sets.
    pub fn explicit<S: AsRef<str>>(
        points: &[S],
        entourage_gens: &[Vec<(S, S)>],
        bornology_gens: &[Vec<S>],
    ) -> Result<Self, SpaceError> {
        let ground = GroundSet::new(points.iter().map(|p| p.as_ref().to_string()))?;
        let n = ground.len();
        let mut gens = Vec::with_capacity(entourage_gens.len());
        for g in entourage_gens {
            let mut e = Entourage::empty(n);
            for (a, b) in g {
                e.insert(ground.position(a.as_ref())?, ground.position(b.as_ref())?);
            }
            gens.push(e);
        }
        let born = bornology_gens
            .iter()
            .map(|b| ground.subset(b))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_parts(ground, gens, born)
    }

    /// Metric space with generators `U_r = {(x, y) : d(x, y) < r}` and the maximal bornology.
    pub fn from_metric<S: AsRef<str>>(
        points: &[S],
        dist: Vec<Vec<Rational>>,
        scales: Vec<Rational>,
    ) -> Result<Self, SpaceError> {
        let ground = GroundSet::new(points.iter().map(|p| p.as_ref().to_string()))?;
        let metric = Metric::new(&ground, dist, scales)?;
        let gens = metric
            .scales()
            .iter()
            .map(|r| metric.neighbourhood(r))
            .collect();
        let all = vec![ground.all()];
        Ok(Self::from_parts(ground, gens, all)?.with_metric(metric))
    }

    pub fn windowed_builtin(kind: BuiltinKind, radius: u32) -> Result<Self, SpaceError> {
        builtin::build(kind, radius)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn coarse(&self) -> &CoarseStructure {
        &self.coarse
    }

    pub fn generators(&self) -> &[Entourage] {
        &self.coarse.generators
    }

    pub fn bornology(&self) -> &Bornology {
        &self.bornology
    }

    pub fn metric(&self) -> Option<&Metric> {
        self.metric.as_ref()
    }

    pub fn window(&self) -> Option<&WindowTag> {
        self.window.as_ref()
    }

    pub fn is_windowed(&self) -> bool {
        self.window.is_some()
    }

    /// `k`-fold composite of `diag ∪ G ∪ G⁻¹`; memoized and safe to call concurrently.
    pub fn closure_at(&self, k: usize) -> Arc<Entourage> {
        self.coarse.closure_at(self.len(), k)
    }

    /// Least `s` with `closure_at(s) = closure_at(s + 1)`.
    pub fn stabilized_at(&self) -> usize {
        self.coarse.stabilized_at(self.len())
    }

    pub fn stabilized_closure(&self) -> Arc<Entourage> {
        self.closure_at(self.stabilized_at())
    }

    pub fn thicken(&self, k: usize, set: &PointSet) -> PointSet {
        self.closure_at(k).thicken(set)
    }

    pub fn thicken_ids<S: AsRef<str>>(&self, k: usize, ids: &[S]) -> Result<Vec<String>, SpaceError> {
        let set = self.ground.subset(ids)?;
        Ok(self.ground.names(&self.thicken(k, &set)))
    }

    pub fn is_u_bounded(&self, k: usize, set: &PointSet) -> bool {
        self.closure_at(k).bounds(set)
    }

    pub fn is_bounded(&self, set: &PointSet) -> bool {
        self.bornology.is_bounded(set)
    }

    /// Classes of the stabilized closure, each sorted, ordered by least member.
    pub fn coarse_components(&self) -> Vec<Vec<usize>> {
        components_of(&self.stabilized_closure())
    }

    pub fn coarse_component_ids(&self) -> Vec<Vec<String>> {
        self.coarse_components()
            .into_iter()
            .map(|c| c.into_iter().map(|i| self.ground.id(i).to_string()).collect())
            .collect()
    }
}

/// Classes of an equivalence relation given as an entourage.
pub(crate) fn components_of(relation: &Entourage) -> Vec<Vec<usize>> {
    let n = relation.size();
    let mut seen = FixedBitSet::with_capacity(n);
    let mut out = Vec::new();
    for x in 0..n {
        if seen.contains(x) {
            continue;
        }
        let class: Vec<usize> = relation.row(x).ones().collect();
        for &y in &class {
            seen.insert(y);
        }
        out.push(class);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> BornCoarseSpace {
        let pts: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let pairs: Vec<(String, String)> = (1..n)
            .map(|i| ((i - 1).to_string(), i.to_string()))
            .collect();
        BornCoarseSpace::explicit(&pts, &[pairs], std::slice::from_ref(&pts)).unwrap()
    }

    #[test]
    fn one_point_space() {
        let x = BornCoarseSpace::explicit(&["a"], &[], &[vec!["a"]]).unwrap();
        assert_eq!(x.len(), 1);
        assert_eq!(*x.closure_at(5), Entourage::diagonal(1));
        assert_eq!(x.stabilized_at(), 0);
    }

    #[test]
    fn single_generator_closure() {
        let x = BornCoarseSpace::explicit(
            &["0", "1", "2"],
            &[vec![("0", "1")]],
            &[vec!["0", "1", "2"]],
        )
        .unwrap();
        let expected = Entourage::from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)]);
        assert_eq!(*x.closure_at(1), expected);
        assert_eq!(x.ground().names(&x.thicken(1, &point_set(3, [0]))), ["0", "1"]);
    }

    #[test]
    fn incompatible_before_cover() {
        let err = BornCoarseSpace::explicit(&["0", "1"], &[vec![("0", "1")]], &[vec!["0"]])
            .unwrap_err();
        assert!(matches!(err, SpaceError::IncompatibleStructures { generator: 0, .. }));
        let err = BornCoarseSpace::explicit(&["0", "1"], &[], &[vec!["0"]]).unwrap_err();
        assert_eq!(err, SpaceError::BornologyDoesNotCover("1".into()));
    }

    #[test]
    fn unknown_and_duplicate_points() {
        let err = BornCoarseSpace::explicit(&["0"], &[vec![("0", "9")]], &[vec!["0"]]).unwrap_err();
        assert_eq!(err, SpaceError::UnknownPoint("9".into()));
        let err = BornCoarseSpace::explicit(&["0", "0"], &[], &[vec!["0"]]).unwrap_err();
        assert_eq!(err, SpaceError::DuplicatePoint("0".into()));
    }

    #[test]
    fn path_stabilizes_at_diameter() {
        let x = path(4);
        assert_eq!(*x.closure_at(3), Entourage::full(4));
        assert_eq!(x.stabilized_at(), 3);
        assert_eq!(*x.closure_at(10), Entourage::full(4));
    }

    #[test]
    fn u_bounded_on_path() {
        let x = path(3);
        let s = point_set(3, [0, 2]);
        assert!(!x.is_u_bounded(1, &s));
        assert!(x.is_u_bounded(2, &s));
        assert!(x.is_u_bounded(0, &point_set(3, [1])));
        assert!(x.is_u_bounded(0, &point_set(3, [])));
    }

    #[test]
    fn empty_space() {
        let x = BornCoarseSpace::explicit::<&str>(&[], &[], &[]).unwrap();
        assert!(x.coarse_components().is_empty());
        assert!(x.closure_at(2).is_empty());
    }

    #[test]
    fn components_with_and_without_generators() {
        let x = BornCoarseSpace::explicit(&["a", "b", "c"], &[], &[vec!["a", "b", "c"]]).unwrap();
        assert_eq!(x.coarse_components(), vec![vec![0], vec![1], vec![2]]);
        let full: Vec<(&str, &str)> = vec![("a", "b"), ("a", "c"), ("b", "c")];
        let y = BornCoarseSpace::explicit(&["a", "b", "c"], &[full], &[vec!["a", "b", "c"]]).unwrap();
        assert_eq!(y.coarse_components(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn closure_is_thread_safe() {
        let x = Arc::new(path(30));
        let handles: Vec<_> = (0..8)
            .map(|t| {
                let x = x.clone();
                std::thread::spawn(move || x.closure_at(t * 4).len())
            })
            .collect();
        let sizes: Vec<usize> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for (t, s) in sizes.iter().enumerate() {
            assert_eq!(*s, x.closure_at(t * 4).len());
        }
    }
}
