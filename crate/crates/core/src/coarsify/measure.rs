use rayon::prelude::*;

use crate::homology::{EngineConfig, FGAbGroup, HomologyError, SimplicialComplex};
use crate::space::BornCoarseSpace;

/// Stated in every coarsification report.
pub const BOUNDED_REDUCTION: &str = "for a finite space the limit over bounded subsets is \
attained at B = X, where the complement is empty; coarsification homology at a scale is \
therefore the unreduced homology of the measure complex at that scale";

/// Supports of finitely supported probability measures with
/// `closure_at(k)`-bounded support: the clique complex of `closure_at(k)`,
/// through dimension `d_max + 1`.
pub fn measure_complex(
    space: &BornCoarseSpace,
    k: usize,
    d_max: usize,
    config: &EngineConfig,
) -> Result<SimplicialComplex, HomologyError> {
    SimplicialComplex::clique(&space.closure_at(k), d_max + 1, config.basis_cap)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarsificationReport {
    pub per_scale: Vec<(usize, Result<Vec<FGAbGroup>, HomologyError>)>,
    pub stabilized_at: usize,
    pub terminal: Vec<FGAbGroup>,
    pub notes: Vec<String>,
}

/// Homology of the measure complex at each listed scale and at the stabilized closure.
pub fn coarsify_homology(
    space: &BornCoarseSpace,
    scales: &[usize],
    d_max: usize,
    config: &EngineConfig,
) -> CoarsificationReport {
    let per_scale: Vec<_> = scales
        .par_iter()
        .map(|&k| (k, measure_complex(space, k, d_max, config).map(|c| c.homology())))
        .collect();
    let s = space.stabilized_at();
    let mut notes = vec![BOUNDED_REDUCTION.to_string()];
    let terminal = match measure_complex(space, s, d_max, config) {
        Ok(c) => c.homology(),
        Err(e) => {
            notes.push(format!(
                "stabilized measure complex too large ({e}); each coarse component spans a \
                 full simplex, so the terminal value is taken from the component count"
            ));
            let mut v = vec![FGAbGroup::zero(); d_max + 1];
            v[0] = FGAbGroup::free(space.coarse_components().len());
            v
        }
    };
    if let Some(w) = space.window() {
        notes.push(format!("window-relative result on {}", w.describe()));
    }
    CoarsificationReport {
        per_scale,
        stabilized_at: s,
        terminal,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::rips_complex;

    fn hexagon() -> BornCoarseSpace {
        let ids: Vec<String> = (0..6).map(|i| i.to_string()).collect();
        let edges: Vec<(String, String)> =
            (0..6).map(|i| (i.to_string(), ((i + 1) % 6).to_string())).collect();
        BornCoarseSpace::explicit(&ids, &[edges], std::slice::from_ref(&ids)).unwrap()
    }

    #[test]
    fn point_at_every_scale() {
        let p = BornCoarseSpace::explicit(&["*"], &[], &[vec!["*"]]).unwrap();
        let r = coarsify_homology(&p, &[0, 1, 2], 2, &EngineConfig::default());
        for (_, h) in &r.per_scale {
            let h = h.as_ref().unwrap();
            assert_eq!(h[0], FGAbGroup::free(1));
            assert!(h[1..].iter().all(FGAbGroup::is_zero));
        }
    }

    #[test]
    fn hexagon_fills_in() {
        let x = hexagon();
        let r = coarsify_homology(&x, &[1], 2, &EngineConfig::default());
        assert_eq!(r.per_scale[0].1.as_ref().unwrap()[1], FGAbGroup::free(1));
        assert_eq!(r.terminal[0], FGAbGroup::free(1));
        assert!(r.terminal[1..].iter().all(FGAbGroup::is_zero));
    }

    #[test]
    fn same_complex_as_rips() {
        let x = hexagon();
        let cfg = EngineConfig::default();
        for k in 0..4 {
            assert_eq!(measure_complex(&x, k, 2, &cfg).unwrap(), rips_complex(&x, k, 2, &cfg).unwrap());
        }
    }
}
