//! Generalized rank invariants, generalized persistence diagrams and
//! bigraded Betti numbers of persistence modules over the grid `[m]×[n]`.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is exact: linear
//! algebra runs over a prime field and all invariants are integers.
//!
//! * [`linalg`]: dense rank, kernels, cokernels and solves over GF(p).
//! * [`gridmod`]: grid modules, interval modules, presentations, the encoded
//!   `ℤ²`-module view and a seeded random corpus.
//! * [`posets`]: intervals and connected regions of the grid, covers, joins
//!   and Möbius functions of the opposite inclusion order.
//! * [`rank`]: limits, colimits and the generalized rank invariant.
//! * [`diagram`]: generalized persistence diagrams over `Con` and `Int`.
//! * [`betti`]: bigraded Betti numbers by the Koszul formula, from
//!   diagrams, and by counting interval corners.
//! * [`complexes`]: homology modules of one-critical bifiltrations.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod betti;
pub mod complexes;
pub mod diagram;
mod error;
pub mod gridmod;
pub mod linalg;
pub mod posets;
pub mod rank;

pub use error::Error;
pub use gridmod::{Grid, GridModule, Point};
pub use linalg::{Field, Matrix};
