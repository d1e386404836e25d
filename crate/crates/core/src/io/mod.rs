//! Space documents, map files, reports and the command-line surface.
//!
//! Space documents are JSON objects of kind `explicit`, `metric` or
//! `builtin`. Rationals are written as `"p/q"` strings and compared exactly.
//! Output is canonical: keys sorted, fixed orders everywhere.

mod cli;
mod document;
mod fixtures;
mod maps;
mod report;

pub use cli::{run, CliOutcome, Format, DEFAULT_MAX_DIM};
pub use document::{emit_space, parse_space, DocumentError, ParseError, SpaceDocument};
pub use fixtures::{cycle_document, fixture, FIXTURE_NAMES};
pub use maps::{named_map, parse_family, parse_subset, MapFile};
pub use report::{digest, homology_value, Report};
