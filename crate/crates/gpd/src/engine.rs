//! Cached region families and parallel evaluation of rank invariants.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use gpd_core::diagram::{dgm_from_ranks, PersistenceDiagram};
use gpd_core::posets::{RegionFamily, CON_CAP};
use gpd_core::rank::{family_rank, RankInvariant};
use gpd_core::{Error, Grid, GridModule};

/// Region families and cover tables, built once per grid.
#[derive(Default)]
pub struct Families {
    int: Mutex<HashMap<Grid, Arc<RegionFamily>>>,
    con: Mutex<HashMap<Grid, Arc<RegionFamily>>>,
    covers: Mutex<HashMap<Grid, Arc<Vec<Vec<usize>>>>>,
}

impl Families {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn int(&self, grid: Grid) -> Arc<RegionFamily> {
        let mut map = self.int.lock().expect("cache lock");
        map.entry(grid)
            .or_insert_with(|| Arc::new(RegionFamily::intervals(grid)))
            .clone()
    }

    /// `Con` of the grid; refused above [`CON_CAP`] points unless `force`.
    pub fn con(&self, grid: Grid, force: bool) -> Result<Arc<RegionFamily>, Error> {
        let mut map = self.con.lock().expect("cache lock");
        if let Some(f) = map.get(&grid) {
            return Ok(f.clone());
        }
        let cap = if force { grid.len().max(CON_CAP) } else { CON_CAP };
        let family = Arc::new(RegionFamily::connected(grid, cap)?);
        map.insert(grid, family.clone());
        Ok(family)
    }

    /// Cover table of `Int` of the grid.
    pub fn int_covers(&self, grid: Grid) -> Arc<Vec<Vec<usize>>> {
        let family = self.int(grid);
        let mut map = self.covers.lock().expect("cache lock");
        map.entry(grid)
            .or_insert_with(|| Arc::new(family.cover_table()))
            .clone()
    }
}

/// Rank invariant with regions evaluated in parallel; output order is the
/// family's canonical order.
pub fn rank_invariant_par(module: &GridModule, family: Arc<RegionFamily>) -> Result<RankInvariant, Error> {
    if family.grid() != module.grid() {
        return Err(Error::FamilyGridMismatch);
    }
    let ranks = (0..family.len())
        .into_par_iter()
        .map(|i| family_rank(module, &family, i))
        .collect();
    Ok(RankInvariant { family, ranks })
}

/// Rank invariant and its diagram.
pub fn diagram_par(
    module: &GridModule,
    family: Arc<RegionFamily>,
) -> Result<(RankInvariant, PersistenceDiagram), Error> {
    let rk = rank_invariant_par(module, family)?;
    let d = dgm_from_ranks(rk.family.clone(), &rk.ranks);
    Ok((rk, d))
}
