//! Python bindings: spaces, maps, homology, Smith normal form and the command line.

use std::sync::Arc;

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use coarsekit::coarsify::{asdim_upper_bound, coarsify_homology, greedy_net, DEFAULT_BUDGET};
use coarsekit::homology::{homology_at_scale, homology_colimit, smith_normal_form_big, BigMatrix};
use coarsekit::io::{emit_space, fixture, named_map, parse_space, parse_subset, MapFile};
use coarsekit::morphisms::{are_close, certify_flasque, check_equivalence, check_morphism, FlasqueCaps};
use coarsekit::{BornCoarseSpace, BuiltinKind, EngineConfig, FGAbGroup, SpaceMap};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn config(basis_cap: Option<usize>) -> EngineConfig {
    let mut c = EngineConfig::default();
    if let Some(cap) = basis_cap {
        c.basis_cap = cap;
    }
    c
}

/// A finitely generated abelian group `Z^free_rank ⊕ ⨁ Z/torsion`.
#[pyclass(frozen, skip_from_py_object, module = "pycoarsekit")]
#[derive(Clone)]
pub struct Group {
    #[pyo3(get)]
    free_rank: usize,
    #[pyo3(get)]
    torsion: Vec<BigInt>,
}

#[pymethods]
impl Group {
    fn __repr__(&self) -> String {
        format!("Group({})", self.to_group())
    }

    fn __str__(&self) -> String {
        self.to_group().to_string()
    }

    fn __eq__(&self, other: &Group) -> bool {
        self.free_rank == other.free_rank && self.torsion == other.torsion
    }

    fn is_zero(&self) -> bool {
        self.to_group().is_zero()
    }
}

impl Group {
    fn to_group(&self) -> FGAbGroup {
        FGAbGroup {
            free_rank: self.free_rank,
            torsion: self.torsion.clone(),
        }
    }
}

impl From<FGAbGroup> for Group {
    fn from(g: FGAbGroup) -> Self {
        Group {
            free_rank: g.free_rank,
            torsion: g.torsion,
        }
    }
}

/// Per-scale homology and the stabilized value.
type ScaledHomology = (Vec<(usize, Vec<Group>)>, Vec<Group>);

fn groups(v: Vec<FGAbGroup>) -> Vec<Group> {
    v.into_iter().map(Group::from).collect()
}

/// A finite bornological coarse space, or a finite window of a builtin one.
#[pyclass(frozen, module = "pycoarsekit")]
pub struct Space {
    inner: Arc<BornCoarseSpace>,
}

#[pymethods]
impl Space {
    /// Parses a space document (JSON text).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Space {
            inner: Arc::new(parse_space(text).map_err(value_err)?),
        })
    }

    /// A named fixture such as `point`, `hexagon`, `cycle:8` or `half_line:20`.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        let doc = fixture(name).ok_or_else(|| value_err(format!("unknown fixture `{name}`")))?;
        Ok(Space {
            inner: Arc::new(doc.build().map_err(value_err)?),
        })
    }

    /// Window of radius `radius` in `half_line`, `int_window` or `grid2_window`.
    #[staticmethod]
    fn builtin(name: &str, radius: u32) -> PyResult<Self> {
        let kind = BuiltinKind::from_name(name).ok_or_else(|| value_err(format!("unknown builtin `{name}`")))?;
        Ok(Space {
            inner: Arc::new(BornCoarseSpace::windowed_builtin(kind, radius).map_err(value_err)?),
        })
    }

    /// Explicit space from point ids, generator entourages given as pair lists, and bounded sets.
    #[staticmethod]
    fn explicit(points: Vec<String>, entourages: Vec<Vec<(String, String)>>, bornology: Vec<Vec<String>>) -> PyResult<Self> {
        Ok(Space {
            inner: Arc::new(BornCoarseSpace::explicit(&points, &entourages, &bornology).map_err(value_err)?),
        })
    }

    fn to_json(&self) -> String {
        emit_space(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        match self.inner.window() {
            Some(w) => format!("Space({})", w.describe()),
            None => format!("Space({} points)", self.inner.len()),
        }
    }

    fn __eq__(&self, other: &Space) -> bool {
        self.inner == other.inner
    }

    #[getter]
    fn points(&self) -> Vec<String> {
        self.inner.ground().ids().to_vec()
    }

    #[getter]
    fn stabilized_at(&self) -> usize {
        self.inner.stabilized_at()
    }

    /// Related pairs of `closure_at(k)`, as id pairs.
    fn closure(&self, k: usize) -> Vec<(String, String)> {
        let g = self.inner.ground();
        self.inner
            .closure_at(k)
            .pairs()
            .map(|(a, b)| (g.id(a).to_string(), g.id(b).to_string()))
            .collect()
    }

    fn coarse_components(&self) -> Vec<Vec<String>> {
        self.inner.coarse_component_ids()
    }

    /// Whether the subset (ids or subset syntax) is bounded.
    fn is_bounded(&self, subset: &str) -> PyResult<bool> {
        let set = parse_subset(&self.inner, subset).map_err(value_err)?;
        Ok(self.inner.is_bounded(&set))
    }

    /// Homology in degrees `0..=max_dim` at scale `scale`, or the colimit when `scale` is omitted.
    #[pyo3(signature = (max_dim = 2, scale = None, basis_cap = None))]
    fn homology(&self, py: Python<'_>, max_dim: usize, scale: Option<usize>, basis_cap: Option<usize>) -> PyResult<Vec<Group>> {
        let cfg = config(basis_cap);
        let x = self.inner.clone();
        py.detach(move || match scale {
            Some(k) => homology_at_scale(&x, k, max_dim, &cfg).map(groups).map_err(value_err),
            None => Ok(groups(homology_colimit(&x, max_dim, &cfg).0)),
        })
    }

    /// Homology of the measure complex at each scale, plus the stabilized value.
    #[pyo3(signature = (scales, max_dim = 2, basis_cap = None))]
    fn qhomology(
        &self,
        py: Python<'_>,
        scales: Vec<usize>,
        max_dim: usize,
        basis_cap: Option<usize>,
    ) -> PyResult<ScaledHomology> {
        let cfg = config(basis_cap);
        let x = self.inner.clone();
        let report = py.detach(move || coarsify_homology(&x, &scales, max_dim, &cfg));
        let per_scale = report
            .per_scale
            .into_iter()
            .map(|(k, r)| r.map(|g| (k, groups(g))).map_err(value_err))
            .collect::<PyResult<Vec<_>>>()?;
        Ok((per_scale, groups(report.terminal)))
    }

    /// Ids of a greedy net at scale `k`.
    fn greedy_net(&self, k: usize) -> Vec<String> {
        self.inner.ground().names(&greedy_net(&self.inner, k))
    }

    /// Heuristic upper bound on asymptotic dimension over the given scales; `None` if none found.
    #[pyo3(signature = (scales, budget = DEFAULT_BUDGET))]
    fn asdim_upper_bound(&self, py: Python<'_>, scales: Vec<usize>, budget: usize) -> Option<usize> {
        let x = self.inner.clone();
        py.detach(move || asdim_upper_bound(&x, &scales, budget).upper_bound)
    }
}

/// A map between two spaces.
#[pyclass(frozen, module = "pycoarsekit")]
pub struct Map {
    inner: SpaceMap,
}

#[pymethods]
impl Map {
    /// From `(source id, target id)` pairs, one per source point.
    #[staticmethod]
    fn from_pairs(source: &Space, target: &Space, pairs: Vec<(String, String)>) -> PyResult<Self> {
        Ok(Map {
            inner: SpaceMap::from_pairs(source.inner.clone(), target.inner.clone(), &pairs).map_err(value_err)?,
        })
    }

    /// A named self-map: `identity`, `shift`, `translate:a[,b]` or `const:ID`.
    #[staticmethod]
    fn named(space: &Space, name: &str) -> PyResult<Self> {
        let f = named_map(&space.inner, name).ok_or_else(|| value_err(format!("unknown map `{name}`")))?;
        Ok(Map {
            inner: f.map_err(value_err)?,
        })
    }

    /// Parses a map file; the two space lines must name fixtures.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let file = MapFile::parse(text).map_err(value_err)?;
        let load = |name: &str| -> PyResult<Arc<BornCoarseSpace>> {
            let doc = fixture(name).ok_or_else(|| value_err(format!("unknown fixture `{name}`")))?;
            Ok(Arc::new(doc.build().map_err(value_err)?))
        };
        let (s, t) = (load(&file.source)?, load(&file.target)?);
        Ok(Map {
            inner: file.build(s, t).map_err(value_err)?,
        })
    }

    #[getter]
    fn source(&self) -> Space {
        Space {
            inner: self.inner.source().clone(),
        }
    }

    #[getter]
    fn target(&self) -> Space {
        Space {
            inner: self.inner.target().clone(),
        }
    }

    fn pairs(&self) -> Vec<(String, String)> {
        self.inner.pairs()
    }

    fn then(&self, next: &Map) -> PyResult<Map> {
        Ok(Map {
            inner: self.inner.then(&next.inner).map_err(value_err)?,
        })
    }

    fn is_morphism(&self) -> bool {
        check_morphism(&self.inner).is_morphism()
    }

    /// Least scale at which the two maps are close, or `None`.
    fn closeness(&self, other: &Map) -> PyResult<Option<usize>> {
        are_close(&self.inner, &other.inner).map_err(value_err)
    }

    fn is_equivalence_with(&self, inverse: &Map) -> PyResult<bool> {
        Ok(check_equivalence(&self.inner, &inverse.inner).map_err(value_err)?.equivalent)
    }

    /// Checks the flasque conditions within the caps; returns the escape table
    /// `(tested set index, least iterate)` or raises with the failing condition.
    #[pyo3(signature = (scale_cap = 4, iter_cap = 64, tested = None))]
    fn certify_flasque(&self, scale_cap: usize, iter_cap: usize, tested: Option<Vec<String>>) -> PyResult<Vec<(usize, usize)>> {
        let space = self.inner.source();
        let tested = tested
            .map(|t| t.iter().map(|s| parse_subset(space, s)).collect::<Result<Vec<_>, _>>())
            .transpose()
            .map_err(value_err)?;
        let caps = FlasqueCaps {
            scale_cap,
            iter_cap,
            tested,
        };
        let cert = certify_flasque(&self.inner, &caps).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(cert.cond3_table)
    }
}

/// Smith normal form of an integer matrix: `(U, S, V)` with `A = U S V`.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn snf(rows: Vec<Vec<BigInt>>) -> PyResult<(Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>)> {
    if rows.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(value_err("rows differ in length"));
    }
    let r = smith_normal_form_big(&BigMatrix::from_rows(rows));
    Ok((r.u.to_rows(), r.s.to_rows(), r.v.to_rows()))
}

/// Nonzero diagonal entries of the Smith normal form.
#[pyfunction]
fn invariant_factors(rows: Vec<Vec<BigInt>>) -> PyResult<Vec<BigInt>> {
    if rows.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(value_err("rows differ in length"));
    }
    Ok(smith_normal_form_big(&BigMatrix::from_rows(rows)).invariant_factors())
}

/// Runs the command line with the given arguments; returns `(exit code, stdout, stderr)`.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    let o = py.detach(move || coarsekit::io::run(std::iter::once("coarsekit".to_string()).chain(args)));
    (o.code, o.stdout, o.stderr)
}

#[pymodule]
fn pycoarsekit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add_class::<Space>()?;
    m.add_class::<Map>()?;
    m.add_function(wrap_pyfunction!(snf, m)?)?;
    m.add_function(wrap_pyfunction!(invariant_factors, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
