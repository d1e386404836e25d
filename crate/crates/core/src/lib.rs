//! Finite bornological coarse spaces, their coarse ordinary homology, and
//! checkers for the axioms of coarse homology theories on concrete instances.
//!
//! Spaces are finite, or finite windows cut from `[0, ∞)`, `Z` and `Z²`.
//! Every certificate produced on a window is relative to that window.

pub mod coarsify;
pub mod homology;
pub mod io;
pub mod morphisms;
pub mod space;

pub use homology::{EngineConfig, FGAbGroup, HomologyError};
pub use morphisms::{MorphismError, SpaceMap};
pub use space::{BornCoarseSpace, BuiltinKind, Entourage, PointSet, SpaceError};
