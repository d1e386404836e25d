use rayon::prelude::*;

use super::basis::{is_isomorphism, HomologyBasis};
use super::chains::{ChainComplexAtScale, TupleFilter};
use super::engine::induced_between;
use super::groups::FGAbGroup;
use super::{EngineConfig, HomologyError};
use crate::space::{BigFamilyPrefix, BornCoarseSpace, PointSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeHomology {
    /// Index of the family member quotiented out.
    pub prefix_index: Option<usize>,
    pub groups: Vec<FGAbGroup>,
}

/// Homology of `C(X) / C(Y_m)` at `closure_at(k)` for the last member `Y_m`.
pub fn relative_homology(
    space: &BornCoarseSpace,
    family: &BigFamilyPrefix,
    k: usize,
    d_max: usize,
    config: &EngineConfig,
) -> Result<RelativeHomology, HomologyError> {
    let filter = TupleFilter {
        support: None,
        quotient: family.last(),
    };
    let c = ChainComplexAtScale::build_filtered(&space.closure_at(k), k, d_max + 1, filter, config)?;
    Ok(RelativeHomology {
        prefix_index: family.len().checked_sub(1),
        groups: c.homology(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeVerdict {
    pub degree: usize,
    pub source: FGAbGroup,
    pub target: FGAbGroup,
    pub isomorphism: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcisionReport {
    pub scale: usize,
    /// Least `i` with `Z ∪ Y_i = X`.
    pub complementary_index: usize,
    /// Member `Y_j` absorbing `closure_at(k)[Y_i]`, used for both quotients.
    pub prefix_index: usize,
    pub degrees: Vec<DegreeVerdict>,
}

impl ExcisionReport {
    pub fn all_isomorphisms(&self) -> bool {
        self.degrees.iter().all(|d| d.isomorphism)
    }
}

/// Compares `C(Z)/C(Z ∩ Y_j) → C(X)/C(Y_j)` on homology in degrees `0..=d_max`.
pub fn mv_check(
    space: &BornCoarseSpace,
    z: &PointSet,
    family: &BigFamilyPrefix,
    k: usize,
    d_max: usize,
    config: &EngineConfig,
) -> Result<ExcisionReport, HomologyError> {
    let all = space.ground().all();
    let i = family
        .members()
        .iter()
        .position(|y| {
            let mut u = z.clone();
            u.union_with(y);
            u == all
        })
        .ok_or(HomologyError::NotComplementary)?;
    let j = family
        .witness(space, i, k)
        .ok_or(HomologyError::PrefixTooShort { member: i, scale: k })?;
    let y = &family.members()[j];
    let relation = space.closure_at(k);
    let (src, tgt) = rayon::join(
        || {
            ChainComplexAtScale::build_filtered(
                &relation,
                k,
                d_max + 1,
                TupleFilter {
                    support: Some(z),
                    quotient: Some(y),
                },
                config,
            )
        },
        || {
            ChainComplexAtScale::build_filtered(
                &relation,
                k,
                d_max + 1,
                TupleFilter {
                    support: None,
                    quotient: Some(y),
                },
                config,
            )
        },
    );
    let (src, tgt) = (src?, tgt?);
    let identity: Vec<usize> = (0..space.len()).collect();
    let degrees = (0..=d_max)
        .into_par_iter()
        .map(|n| {
            let m = induced_between(&src, &tgt, &identity, n)?;
            Ok(verdict(n, &m.homology, &m.source_basis, &m.target_basis))
        })
        .collect::<Result<Vec<_>, HomologyError>>()?;
    Ok(ExcisionReport {
        scale: k,
        complementary_index: i,
        prefix_index: j,
        degrees,
    })
}

fn verdict(
    n: usize,
    map: &super::matrix::BigMatrix,
    source: &HomologyBasis,
    target: &HomologyBasis,
) -> DegreeVerdict {
    DegreeVerdict {
        degree: n,
        source: source.group.clone(),
        target: target.group.clone(),
        isomorphism: is_isomorphism(map, source, target),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{point_set, BuiltinKind};

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    #[test]
    fn quotient_by_everything_or_nothing() {
        let x = BornCoarseSpace::windowed_builtin(BuiltinKind::HalfLine, 6).unwrap();
        let everything = BigFamilyPrefix::new(&x, vec![x.ground().all()], 1).unwrap();
        let r = relative_homology(&x, &everything, 1, 2, &cfg()).unwrap();
        assert!(r.groups.iter().all(FGAbGroup::is_zero));
        let nothing = BigFamilyPrefix::new(&x, vec![point_set(7, [])], 1).unwrap();
        let r = relative_homology(&x, &nothing, 1, 2, &cfg()).unwrap();
        assert_eq!(r.groups[0], FGAbGroup::free(1));
    }

    #[test]
    fn initial_segment_kills_the_path() {
        let x = BornCoarseSpace::windowed_builtin(BuiltinKind::HalfLine, 20).unwrap();
        let members = (0..=10).map(|i| point_set(21, 0..=i)).collect();
        let fam = BigFamilyPrefix::new(&x, members, 1).unwrap();
        let r = relative_homology(&x, &fam, 1, 2, &cfg()).unwrap();
        assert_eq!(r.prefix_index, Some(10));
        assert!(r.groups.iter().all(FGAbGroup::is_zero));
    }

    #[test]
    fn excision_on_a_path() {
        let x = BornCoarseSpace::windowed_builtin(BuiltinKind::HalfLine, 20).unwrap();
        let members = (0..=12).map(|i| point_set(21, 0..=i)).collect();
        let fam = BigFamilyPrefix::new(&x, members, 1).unwrap();
        let z = point_set(21, 8..=20);
        let r = mv_check(&x, &z, &fam, 1, 2, &cfg()).unwrap();
        assert_eq!(r.complementary_index, 7);
        assert_eq!(r.prefix_index, 8);
        assert!(r.all_isomorphisms());
    }

    #[test]
    fn whole_space_is_excisive() {
        let x = BornCoarseSpace::windowed_builtin(BuiltinKind::HalfLine, 8).unwrap();
        let fam = BigFamilyPrefix::new(&x, vec![point_set(9, [0]), point_set(9, [0, 1])], 1).unwrap();
        let r = mv_check(&x, &x.ground().all(), &fam, 1, 1, &cfg()).unwrap();
        assert!(r.all_isomorphisms());
    }

    #[test]
    fn refusals() {
        let x = BornCoarseSpace::windowed_builtin(BuiltinKind::HalfLine, 20).unwrap();
        let fam = BigFamilyPrefix::new(&x, vec![point_set(21, 0..=3)], 1).unwrap();
        let z = point_set(21, 8..=20);
        assert_eq!(mv_check(&x, &z, &fam, 1, 1, &cfg()), Err(HomologyError::NotComplementary));
        let fam = BigFamilyPrefix::new(&x, vec![point_set(21, 0..=8)], 1).unwrap();
        assert_eq!(
            mv_check(&x, &z, &fam, 1, 1, &cfg()),
            Err(HomologyError::PrefixTooShort { member: 0, scale: 1 })
        );
    }
}
