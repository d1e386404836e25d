//! Coarse ordinary homology.
//!
//! Chains at scale `k` are integer combinations of nondegenerate tuples whose
//! entries are pairwise related by `closure_at(k)`. Homology is read off from
//! Smith normal forms, computed exactly with machine integers and repeated
//! over big integers on overflow.

mod basis;
mod chains;
mod engine;
mod groups;
mod int;
mod matrix;
mod relative;
mod simplicial;
mod snf;
mod sparse;
mod swindle;

use thiserror::Error;

pub use basis::{homology_matrix, is_isomorphism, HomologyBasis};
pub use chains::{boundary_matrix, controlled_tuples, ChainComplexAtScale, Tuple, TupleBasis};
pub use engine::{
    homology_at_scale, homology_colimit, induced_map, induced_map_at, prism, InducedMap,
    PrismResult, StabilizationReport,
};
pub use groups::FGAbGroup;
pub use int::{to_i64, Int};
pub use matrix::{BigMatrix, Matrix};
pub use relative::{mv_check, relative_homology, DegreeVerdict, ExcisionReport, RelativeHomology};
pub use simplicial::{rips_complex, SimplicialComplex};
pub use snf::{smith_normal_form, smith_normal_form_big, SnfResult};
pub use sparse::{invariant_factors, rank, SparseMatrix};
pub use swindle::{swindle_identity_check, SwindleReport};

/// Default limit on the number of tuples in one degree.
pub const DEFAULT_BASIS_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub basis_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            basis_cap: DEFAULT_BASIS_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("degree {degree} basis reached {bound} tuples, above the cap of {cap}")]
    DegreeCapExceeded { degree: usize, bound: usize, cap: usize },
    #[error("image tuple is not controlled at target scale {scale}")]
    NotControlledAtScale { scale: usize },
    #[error("maps are not close")]
    NotClose,
    #[error("maps do not share source and target")]
    SourceTargetMismatch,
    #[error("iterate {} of the map still meets the bounded set; raise the depth", depth + 1)]
    WindowTooSmall { depth: usize },
    #[error("no family member together with the subset covers the space")]
    NotComplementary,
    #[error("no family member absorbs the scale-{scale} thickening of member {member}")]
    PrefixTooShort { member: usize, scale: usize },
}
