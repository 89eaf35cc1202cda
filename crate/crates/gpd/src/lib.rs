//! File formats, JSON documents, SVG plots and the `gpd` command-line tool
//! on top of [`gpd_core`].
//!
//! * [`format`]: the `gpdmod 1` module and `gpdbif 1` bifiltration formats.
//! * [`json`]: rank invariant, diagram, barcode and Betti documents.
//! * [`engine`]: cached region families and parallel rank evaluation.
//! * [`check`]: every cross-validation relation on one module.
//! * [`svg`]: pictures of `Int` diagrams with their corner points.
//! * [`cli`]: the command-line front end.

pub mod check;
pub mod cli;
pub mod engine;
pub mod format;
pub mod json;
pub mod svg;

pub use gpd_core;
