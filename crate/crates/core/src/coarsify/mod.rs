//! Covers, nerves, anti-Čech prefixes and their telescopes, measure
//! complexes and coarsification homology, asymptotic-dimension estimates,
//! hybrid entourages and uniform decompositions.

mod asdim;
mod cover;
mod hybrid;
mod measure;
mod nerve;

use thiserror::Error;

pub use asdim::{asdim_upper_bound, AsdimReport, AsdimScale, DEFAULT_BUDGET, HEURISTIC_NOTE};
pub use cover::{
    check_cover, cover_from_net, greedy_net, is_lebesgue, is_net, largest_lebesgue, least_bound,
    maximal_cliques, Cover, LebesgueMethod, CLIQUE_CAP,
};
pub use hybrid::{hybrid_entourage, uniform_decomposition_check, DecompositionReport};
pub use measure::{coarsify_homology, measure_complex, CoarsificationReport, BOUNDED_REDUCTION};
pub use nerve::{anti_cech, coarsening_space, nerve, AntiCechPrefix, Telescope};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoarsifyError {
    #[error("members do not cover point `{0}`")]
    NotACover(String),
    #[error("anti-Čech certificate fails between cover {0} and its successor")]
    CertificateFailed(usize),
    #[error("no scales given")]
    EmptyScales,
    #[error("phi increases at member {0}")]
    PhiNotDecreasing(usize),
    #[error("phi has {phi} entries for {family} family members")]
    PhiLength { phi: usize, family: usize },
    #[error("the two subsets do not cover the space")]
    NotADecomposition,
    #[error("space carries no metric")]
    NoMetric,
    #[error("radii must be positive and strictly decreasing")]
    BadRadii,
}
