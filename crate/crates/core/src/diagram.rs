//! Generalized persistence diagrams: Möbius inversion of the generalized
//! rank invariant over `Con` or `Int`, ordered by reverse inclusion.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::Error;
use crate::gridmod::{random_module, Grid, GridModule, Point, RandomKind};
use crate::linalg::Field;
use crate::posets::{join, FamilyKind, Interval, Mobius, PointSet, RegionFamily};
use crate::rank::{rank_invariant, RankInvariant};

/// Signed integer values on the regions of a family, in canonical order.
#[derive(Clone, Debug)]
pub struct PersistenceDiagram {
    family: Arc<RegionFamily>,
    values: Vec<i64>,
}

impl PartialEq for PersistenceDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.kind() == other.kind() && self.grid() == other.grid() && self.values == other.values
    }
}

impl Eq for PersistenceDiagram {}

impl PersistenceDiagram {
    pub fn new(family: Arc<RegionFamily>, values: Vec<i64>) -> Result<Self, Error> {
        if values.len() != family.len() {
            return Err(Error::DimensionMismatch {
                expected: family.len(),
                found: values.len(),
            });
        }
        Ok(PersistenceDiagram { family, values })
    }

    pub fn family(&self) -> &Arc<RegionFamily> {
        &self.family
    }

    pub fn kind(&self) -> FamilyKind {
        self.family.kind()
    }

    pub fn grid(&self) -> Grid {
        self.family.grid()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> i64 {
        self.values[i]
    }

    pub fn set(&mut self, i: usize, v: i64) {
        self.values[i] = v;
    }

    /// `(region index, value)` for every nonzero entry.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0)
            .map(|(i, v)| (i, *v))
    }

    /// `Σ_{J ∋ p} dgm(J)`.
    pub fn hilbert(&self, p: Point) -> i64 {
        let grid = self.grid();
        self.nonzero()
            .filter(|&(j, _)| self.family.set(j).contains_point(grid, p))
            .map(|(_, v)| v)
            .sum()
    }

    /// Entrywise sum of two diagrams over the same family.
    pub fn add(&self, other: &PersistenceDiagram) -> Result<PersistenceDiagram, Error> {
        if self.family.kind() != other.family.kind() || self.family.grid() != other.family.grid() {
            return Err(Error::FamilyGridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(PersistenceDiagram {
            family: self.family.clone(),
            values,
        })
    }

    /// Nonzero entries as an interval multiset; `None` if some value is
    /// negative or sits on a non-interval region.
    pub fn as_barcode(&self) -> Option<crate::gridmod::Barcode> {
        let mut out = crate::gridmod::Barcode::new();
        for (i, v) in self.nonzero() {
            let interval = self.family.interval(i)?;
            if v < 0 {
                return None;
            }
            out.insert(interval.clone(), v as usize);
        }
        Some(out)
    }
}

/// Solves `rk(I) = Σ_{J ⊇ I} dgm(J)` by back-substitution, largest regions
/// first.
pub fn dgm_from_ranks(family: Arc<RegionFamily>, ranks: &[usize]) -> PersistenceDiagram {
    assert_eq!(ranks.len(), family.len());
    let mut values = alloc::vec![0i64; family.len()];
    let mut nonzero: Vec<usize> = Vec::new();
    for i in family.by_decreasing_size() {
        let s = family.set(i);
        let above: i64 = nonzero
            .iter()
            .filter(|&&j| family.set(j).contains_set(s))
            .map(|&j| values[j])
            .sum();
        let v = ranks[i] as i64 - above;
        if v != 0 {
            values[i] = v;
            nonzero.push(i);
        }
    }
    PersistenceDiagram { family, values }
}

fn require(family: &RegionFamily, module: &GridModule, kind: FamilyKind) -> Result<(), Error> {
    if family.kind() != kind {
        return Err(Error::FamilyMismatch {
            expected: kind,
            found: family.kind(),
        });
    }
    if family.grid() != module.grid() {
        return Err(Error::FamilyGridMismatch);
    }
    Ok(())
}

/// `dgm(M)` over `Con`.
pub fn dgm(module: &GridModule, family: Arc<RegionFamily>) -> Result<PersistenceDiagram, Error> {
    require(&family, module, FamilyKind::Con)?;
    let rk = rank_invariant(module, family)?;
    Ok(dgm_from_ranks(rk.family, &rk.ranks))
}

/// `dgm_I(M)` over `Int`.
pub fn dgm_int(module: &GridModule, family: Arc<RegionFamily>) -> Result<PersistenceDiagram, Error> {
    require(&family, module, FamilyKind::Int)?;
    let rk = rank_invariant(module, family)?;
    Ok(dgm_from_ranks(rk.family, &rk.ranks))
}

/// The same inversion through explicit Möbius values.
pub fn dgm_via_mobius(rk: &RankInvariant) -> PersistenceDiagram {
    let family = &rk.family;
    let mut mu = Mobius::new(family);
    let mut values = alloc::vec![0i64; family.len()];
    // dgm(I) = Σ_{J ⊇ I} μ(J, I) rk(J); scatter each row μ(J, ·)
    for j in 0..family.len() {
        if rk.ranks[j] == 0 {
            continue;
        }
        for &(i, m) in mu.row(j) {
            values[i] += m * rk.ranks[j] as i64;
        }
    }
    PersistenceDiagram {
        family: family.clone(),
        values,
    }
}

/// `dgm_I(M)(I) = rk(I) + Σ_{∅≠S⊆cov(I)} (−1)^|S| rk(⋁S)`.
///
/// `covers` is the cover table of the family; pass `None` to compute it.
pub fn dgm_int_via_covers(rk: &RankInvariant, covers: Option<&[Vec<usize>]>) -> Result<PersistenceDiagram, Error> {
    let family = &rk.family;
    if family.kind() != FamilyKind::Int {
        return Err(Error::FamilyMismatch {
            expected: FamilyKind::Int,
            found: family.kind(),
        });
    }
    let owned;
    let covers = match covers {
        Some(c) => c,
        None => {
            owned = family.cover_table();
            &owned
        }
    };
    let grid = family.grid();
    // the hull of a union is the meet of its up- and down-closures
    let closures: Vec<(PointSet, PointSet)> = (0..family.len())
        .map(|j| {
            let interval = family.interval(j).expect("Int regions are intervals");
            let (mins, maxs) = (interval.minima(), interval.maxima());
            let mut up = PointSet::empty(grid);
            let mut down = PointSet::empty(grid);
            for (k, q) in grid.points().enumerate() {
                if mins.iter().any(|a| a.leq(q)) {
                    up.insert(k);
                }
                if maxs.iter().any(|b| q.leq(*b)) {
                    down.insert(k);
                }
            }
            (up, down)
        })
        .collect();
    let mut values = alloc::vec![0i64; family.len()];
    for (i, cov) in covers.iter().enumerate() {
        let mut v = rk.ranks[i] as i64;
        let size = 1usize << cov.len();
        let mut ups = alloc::vec![PointSet::empty(grid); size];
        let mut downs = alloc::vec![PointSet::empty(grid); size];
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let (up, down) = &closures[cov[low]];
            ups[mask] = if rest == 0 { up.clone() } else { ups[rest].union(up) };
            downs[mask] = if rest == 0 {
                down.clone()
            } else {
                downs[rest].union(down)
            };
            let joined = match family.index_of(&ups[mask].intersection(&downs[mask])) {
                Some(k) => k,
                None => {
                    let members: Vec<Interval> = (0..cov.len())
                        .filter(|b| mask >> b & 1 == 1)
                        .map(|b| family.interval(cov[b]).unwrap().clone())
                        .collect();
                    let j = join(&members, grid)?;
                    family.index_of(&j.to_set(grid)).expect("joins are enumerated")
                }
            };
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            v += sign * rk.ranks[joined] as i64;
        }
        values[i] = v;
    }
    Ok(PersistenceDiagram {
        family: family.clone(),
        values,
    })
}

/// Checks `rk(I) = Σ_{J ⊇ I} D(J)` at every region, reporting the first
/// region (in canonical order) where it fails.
pub fn verify_inversion(rk: &RankInvariant, d: &PersistenceDiagram) -> Result<(), Error> {
    if rk.family.kind() != d.kind() {
        return Err(Error::FamilyMismatch {
            expected: rk.family.kind(),
            found: d.kind(),
        });
    }
    if rk.family.grid() != d.grid() || rk.family.len() != d.values.len() {
        return Err(Error::FamilyGridMismatch);
    }
    let family = &rk.family;
    let nonzero: Vec<(usize, i64)> = d.nonzero().collect();
    for i in 0..family.len() {
        let s = family.set(i);
        let found: i64 = nonzero
            .iter()
            .filter(|(j, _)| family.set(*j).contains_set(s))
            .map(|(_, v)| v)
            .sum();
        let expected = rk.ranks[i] as i64;
        if found != expected {
            return Err(Error::InversionMismatch {
                region: i,
                expected,
                found,
            });
        }
    }
    Ok(())
}

/// First seed whose presentation module has a negative `dgm_I` entry.
pub fn find_negative_witness(
    grid: Grid,
    field: Field,
    seeds: Range<u64>,
) -> Option<(u64, GridModule, PersistenceDiagram)> {
    let family = Arc::new(RegionFamily::intervals(grid));
    seeds.into_iter().find_map(|seed| {
        let (module, _) = random_module(seed, grid, field, RandomKind::Presentation);
        let d = dgm_int(&module, family.clone()).expect("family matches the grid");
        d.values.iter().any(|&v| v < 0).then_some((seed, module, d))
    })
}

/// First seed whose presentation module has a nonzero `dgm` value on a
/// connected region that is not an interval, with that region's index.
pub fn find_non_interval_support(
    grid: Grid,
    field: Field,
    family: Arc<RegionFamily>,
    seeds: Range<u64>,
) -> Option<(u64, usize)> {
    seeds.into_iter().find_map(|seed| {
        let (module, _) = random_module(seed, grid, field, RandomKind::Presentation);
        let d = dgm(&module, family.clone()).ok()?;
        let hit = d.nonzero().find(|&(i, _)| !family.is_interval(i));
        hit.map(|(i, _)| (seed, i))
    })
}
