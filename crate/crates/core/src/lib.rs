//! Planar tree linkages and their self-touching configurations.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//! - the linkage and configuration model;
//! - a tolerant segment-contact kernel;
//! - offset-encoded self-touching configurations;
//! - a two-rule rigidity reduction with a first-order rank test;
//! - a flattening heuristic;
//! - the fixture generators.
//!
//! File formats, the command line and parallel experiment drivers live in
//! the `linklock` companion crate.

#![no_std]

extern crate alloc;

pub mod constructions;
pub mod flatten;
pub mod geom;
pub mod model;
pub mod rigidity;
pub mod touching;
mod unionfind;

pub use geom::Point;
pub use model::{Configuration, Edge, Linkage, ModelError, Motion, Sample};

/// Length residual accepted as "equal" for edge lengths.
pub const TOL_LEN: f64 = 1e-9;
/// Contact tolerance of the segment predicates; contacts this close count as touching.
pub const TOL_GEOM: f64 = 1e-9;
/// Slack on angular comparisons.
pub const TOL_ANG: f64 = 1e-9;
/// Relative singular-value cutoff of the rank test.
pub const TOL_RANK: f64 = 1e-7;
/// A configuration is flat when its flatness is at most this.
pub const FLAT_TOL: f64 = 1e-4;
