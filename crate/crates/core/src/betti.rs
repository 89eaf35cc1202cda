//! Bigraded Betti numbers of the `ℤ²`-module encoded by a grid module.
//!
//! Four routes are provided and agree exactly:
//!
//! * [`betti_koszul`] evaluates the local Koszul formula from zigzag
//!   multiplicities and neighbouring dimensions;
//! * [`betti_gpd`] sums `dgm` over `Con` against a coefficient table keyed by
//!   how a region meets the square `{p−e1−e2, p−e1, p−e2, p}`;
//! * [`betti_gpd_int`] does the same with `dgm_I` over `Int`, where only four
//!   masks can occur for `β1`;
//! * [`betti_corner`] counts corner types of the intervals supporting
//!   `dgm_I`, weighted by their (possibly negative) values.
//!
//! On `[m]×[n]` the diagram routes use the region sums directly. On the
//! outer strip `x = m+1` or `y = n+1` the encoded module is constant across
//! the boundary, so every Betti number there is zero and the diagram routes
//! report zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::diagram::PersistenceDiagram;
use crate::error::Error;
use crate::gridmod::{EncodedModule, Grid, GridModule, Point};
use crate::posets::{FamilyKind, Interval};
use crate::rank::zigzag_corner_mults;

/// `β0, β1, β2` at every point of `[m+1]×[n+1]` for a module on `[m]×[n]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BettiTable {
    grid: Grid,
    values: Vec<[i64; 3]>,
}

impl BettiTable {
    pub fn zeros(grid: Grid) -> Self {
        BettiTable {
            grid,
            values: vec![[0; 3]; grid.expanded().len()],
        }
    }

    /// The module's grid; the table covers `grid.expanded()`.
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Zero outside `[m+1]×[n+1]`.
    pub fn get(&self, p: Point) -> [i64; 3] {
        let support = self.grid.expanded();
        if support.contains(p) {
            self.values[support.index(p)]
        } else {
            [0; 3]
        }
    }

    pub fn set(&mut self, p: Point, v: [i64; 3]) {
        let support = self.grid.expanded();
        let i = support.index(p);
        self.values[i] = v;
    }

    /// Every support point with its triple, in canonical point order.
    pub fn entries(&self) -> impl Iterator<Item = (Point, [i64; 3])> + '_ {
        let support = self.grid.expanded();
        self.values.iter().enumerate().map(move |(i, v)| (support.point(i), *v))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (Point, [i64; 3])> + '_ {
        self.entries().filter(|(_, v)| *v != [0; 3])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(|&b| b >= 0))
    }

    pub fn add(&self, other: &BettiTable) -> Result<BettiTable, Error> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| [a[0] + b[0], a[1] + b[1], a[2] + b[2]])
            .collect();
        Ok(BettiTable {
            grid: self.grid,
            values,
        })
    }
}

/// Which of `p−e1−e2, p−e1, p−e2, p` lie in a region.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CornerMask(u8);

impl CornerMask {
    pub const A: u8 = 1; // p − e1 − e2
    pub const B: u8 = 2; // p − e1
    pub const C: u8 = 4; // p − e2
    pub const D: u8 = 8; // p

    pub const fn from_bits(bits: u8) -> Self {
        CornerMask(bits & 15)
    }

    pub fn of(p: Point, member: impl Fn(Point) -> bool) -> Self {
        let mut bits = 0;
        for (bit, q) in [
            (Self::A, p.offset(-1, -1)),
            (Self::B, p.offset(-1, 0)),
            (Self::C, p.offset(0, -1)),
            (Self::D, p),
        ] {
            if member(q) {
                bits |= bit;
            }
        }
        CornerMask(bits)
    }

    pub const fn bits(self) -> u8 {
        self.0
    }

    /// Coefficients of a region's diagram value in `(β0, β1, β2)` at `p`.
    pub const fn coefficients(self) -> [i64; 3] {
        COEFFICIENTS[self.0 as usize]
    }

    /// As [`CornerMask::coefficients`], keeping only the `β1` masks an
    /// interval can produce.
    pub const fn interval_coefficients(self) -> [i64; 3] {
        let [b0, b1, b2] = COEFFICIENTS[self.0 as usize];
        let b1 = match self.0 {
            m if m == Self::B || m == Self::C => b1,
            m if m == Self::A | Self::B | Self::C => b1,
            m if m == Self::B | Self::C | Self::D => b1,
            _ => 0,
        };
        [b0, b1, b2]
    }
}

const fn coefficient_table() -> [[i64; 3]; 16] {
    const A: u8 = CornerMask::A;
    const B: u8 = CornerMask::B;
    const C: u8 = CornerMask::C;
    const D: u8 = CornerMask::D;
    let mut t = [[0i64; 3]; 16];
    let mut m = 0u8;
    while m < 16 {
        let bc = m & (B | C);
        if m & D != 0 && bc == 0 {
            t[m as usize][0] = 1;
        }
        if m & A != 0 && bc == 0 {
            t[m as usize][2] = 1;
        }
        t[m as usize][1] = match m {
            x if x == B || x == C => 1,
            x if x == A | B | C => 1,
            x if x == B | C => 2,
            x if x == B | C | D => 1,
            x if x == A | B | D || x == A | C | D => -1,
            _ => 0,
        };
        m += 1;
    }
    t
}

const COEFFICIENTS: [[i64; 3]; 16] = coefficient_table();

/// `τ_j(I′)(p)` for the unit-square expansion `I′` of `I`, any `p ∈ ℤ²`.
pub fn corner_type(interval: &Interval, p: Point, j: usize) -> i64 {
    CornerMask::of(p, |q| interval.contains_point(q)).interval_coefficients()[j]
}

/// All three corner types of `I` at `p`.
pub fn corner_types(interval: &Interval, p: Point) -> [i64; 3] {
    CornerMask::of(p, |q| interval.contains_point(q)).interval_coefficients()
}

/// `(β0, β1, β2)` of the encoded module at any `p ∈ ℤ²`.
pub fn koszul_at(e: &EncodedModule<'_>, p: Point) -> [i64; 3] {
    let dim = |q: Point| e.eval(q) as i64;
    let (n_p, _) = zigzag_corner_mults(e, p);
    let (_, m_a) = zigzag_corner_mults(e, p.offset(-1, -1));
    let euler = dim(p) - dim(p.offset(-1, 0)) - dim(p.offset(0, -1)) + dim(p.offset(-1, -1));
    [n_p, n_p - euler + m_a, m_a]
}

/// Betti numbers from the Koszul formula, on `[m+1]×[n+1]`.
pub fn betti_koszul(module: &GridModule) -> BettiTable {
    let e = module.encoded();
    let mut table = BettiTable::zeros(module.grid());
    for p in module.grid().expanded().points() {
        table.set(p, koszul_at(&e, p));
    }
    table
}

fn require(d: &PersistenceDiagram, kind: FamilyKind) -> Result<(), Error> {
    if d.kind() != kind {
        return Err(Error::FamilyMismatch {
            expected: kind,
            found: d.kind(),
        });
    }
    Ok(())
}

fn weighted_masks(d: &PersistenceDiagram, coefficients: fn(CornerMask) -> [i64; 3]) -> BettiTable {
    let grid = d.grid();
    let family = d.family();
    let mut table = BettiTable::zeros(grid);
    let nonzero: Vec<(usize, i64)> = d.nonzero().collect();
    for p in grid.points() {
        let mut acc = [0i64; 3];
        for &(j, v) in &nonzero {
            let s = family.set(j);
            let c = coefficients(CornerMask::of(p, |q| grid.contains(q) && s.contains_point(grid, q)));
            for k in 0..3 {
                acc[k] += c[k] * v;
            }
        }
        table.set(p, acc);
    }
    table
}

/// Betti numbers from `dgm` over `Con` with all seven `β1` mask classes.
pub fn betti_gpd(d: &PersistenceDiagram) -> Result<BettiTable, Error> {
    require(d, FamilyKind::Con)?;
    Ok(weighted_masks(d, CornerMask::coefficients))
}

/// Betti numbers from `dgm_I` over `Int` with the four interval masks.
pub fn betti_gpd_int(d: &PersistenceDiagram) -> Result<BettiTable, Error> {
    require(d, FamilyKind::Int)?;
    Ok(weighted_masks(d, CornerMask::interval_coefficients))
}

/// Betti numbers as signed corner counts of the intervals supporting `dgm_I`.
pub fn betti_corner(d: &PersistenceDiagram) -> Result<BettiTable, Error> {
    require(d, FamilyKind::Int)?;
    let grid = d.grid();
    let family = d.family();
    let mut table = BettiTable::zeros(grid);
    for (j, v) in d.nonzero() {
        let interval = family.interval(j).expect("Int regions are intervals");
        for p in grid.points() {
            let t = corner_types(interval, p);
            let mut cur = table.get(p);
            for k in 0..3 {
                cur[k] += v * t[k];
            }
            table.set(p, cur);
        }
    }
    Ok(table)
}
