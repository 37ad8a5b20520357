//! File formats, SVG output, the lockedness probe and the command line for
//! [`linklock_core`].

pub mod cli;
pub mod fixtures;
pub mod io;
pub mod probe;
pub mod render;

pub use linklock_core as core;
