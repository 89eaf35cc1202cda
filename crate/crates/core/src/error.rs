use alloc::string::String;

use thiserror::Error;

use crate::posets::FamilyKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field modulus {0} is not a prime below 65536")]
    InvalidField(u32),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point ({x}, {y}) lies outside the grid [{m}]x[{n}]")]
    OutOfGrid { x: i64, y: i64, m: usize, n: usize },
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("region is empty")]
    EmptyRegion,
    #[error("region is not connected")]
    Disconnected,
    #[error("modules live on different grids or fields")]
    GridMismatch,
    #[error("relation {relation} has a nonzero coefficient on generator {generator}, which is not below the relation's grade")]
    NonHomogeneousRelation { relation: usize, generator: usize },
    #[error("relation {relation} has {found} coefficients, expected one per generator ({expected})")]
    CoefficientCount {
        relation: usize,
        expected: usize,
        found: usize,
    },
    #[error("Con enumeration refused: grid has {points} points, cap is {cap}")]
    ConCapExceeded { points: usize, cap: usize },
    #[error("join is ambiguous: {candidates} inclusion-minimal intervals contain the union")]
    JoinAmbiguous { candidates: usize },
    #[error("expected a diagram over {expected}, got one over {found}")]
    FamilyMismatch { expected: FamilyKind, found: FamilyKind },
    #[error("region family does not belong to this module's grid")]
    FamilyGridMismatch,
    #[error("inversion fails at region {region}: rank {expected}, diagram sum {found}")]
    InversionMismatch { region: usize, expected: i64, found: i64 },
    #[error("module fails validation ({0} violations)")]
    InvalidModule(usize),
    #[error("bifiltration fails validation ({0} violations)")]
    InvalidBifiltration(usize),
}
