//! Cross-validation of every invariant relation on one module.

use std::fmt;

use gpd_core::betti::{betti_corner, betti_gpd, betti_gpd_int, betti_koszul, koszul_at, BettiTable};
use gpd_core::diagram::{dgm_int_via_covers, verify_inversion, PersistenceDiagram};
use gpd_core::rank::RankInvariant;
use gpd_core::{Error, GridModule, Point};

use crate::engine::{diagram_par, Families};

/// The first relation that failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    pub check: &'static str,
    pub detail: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.detail)
    }
}

#[derive(Debug)]
pub enum CheckError {
    Failed(CheckFailure),
    Core(Error),
}

impl From<Error> for CheckError {
    fn from(e: Error) -> Self {
        CheckError::Core(e)
    }
}

fn fail(check: &'static str, detail: impl Into<String>) -> CheckError {
    CheckError::Failed(CheckFailure {
        check,
        detail: detail.into(),
    })
}

/// Which families were exercised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub passed: Vec<&'static str>,
    pub con_checked: bool,
}

fn hilbert(module: &GridModule, d: &PersistenceDiagram, check: &'static str) -> Result<(), CheckError> {
    for p in module.grid().points() {
        let found = d.hilbert(p);
        if found != module.dim(p) as i64 {
            return Err(fail(
                check,
                format!("at {p:?}: diagram gives {found}, dim is {}", module.dim(p)),
            ));
        }
    }
    Ok(())
}

fn monotone(rk: &RankInvariant, covers: &[Vec<usize>], check: &'static str) -> Result<(), CheckError> {
    // covers generate containment, so checking them suffices
    for (i, above) in covers.iter().enumerate() {
        for &j in above {
            if rk.ranks[j] > rk.ranks[i] {
                return Err(fail(
                    check,
                    format!(
                        "region {j} contains region {i} but has rank {} > {}",
                        rk.ranks[j], rk.ranks[i]
                    ),
                ));
            }
        }
    }
    Ok(())
}

fn same_table(a: &BettiTable, b: &BettiTable, check: &'static str) -> Result<(), CheckError> {
    if let Some((p, v)) = a.entries().find(|(p, v)| *v != b.get(*p)) {
        return Err(fail(check, format!("at {p:?}: {v:?} vs {:?}", b.get(p))));
    }
    Ok(())
}

fn inversion(rk: &RankInvariant, d: &PersistenceDiagram, check: &'static str) -> Result<(), CheckError> {
    match verify_inversion(rk, d) {
        Ok(()) => Ok(()),
        Err(e @ Error::InversionMismatch { .. }) => Err(fail(check, e.to_string())),
        Err(e) => Err(e.into()),
    }
}

/// Runs every relation on `module`. The `Con` checks run only when the
/// family is within the cap, or always with `force`.
pub fn run_checks(module: &GridModule, families: &Families, force: bool) -> Result<CheckReport, CheckError> {
    let grid = module.grid();
    let mut passed = Vec::new();

    let int = families.int(grid);
    let covers = families.int_covers(grid);
    let (rk, d) = diagram_par(module, int)?;
    inversion(&rk, &d, "int-inversion")?;
    passed.push("int-inversion");

    let via_covers = dgm_int_via_covers(&rk, Some(&covers))?;
    if let Some(i) = (0..d.values().len()).find(|&i| d.get(i) != via_covers.get(i)) {
        return Err(fail(
            "cover-formula",
            format!("region {i}: {} vs {}", d.get(i), via_covers.get(i)),
        ));
    }
    passed.push("cover-formula");

    hilbert(module, &d, "int-hilbert")?;
    passed.push("int-hilbert");
    monotone(&rk, &covers, "int-monotone")?;
    passed.push("int-monotone");

    let koszul = betti_koszul(module);
    if !koszul.is_nonnegative() {
        return Err(fail("betti-nonnegative", "negative Koszul entry"));
    }
    let e = module.encoded();
    let outer = grid.expanded().expanded();
    for p in (-1..=outer.m as i64).flat_map(|x| (-1..=outer.n as i64).map(move |y| Point::new(x, y))) {
        if !grid.expanded().contains(p) && koszul_at(&e, p) != [0; 3] {
            return Err(fail("betti-support", format!("nonzero Koszul value at {p:?}")));
        }
    }
    passed.push("betti-support");
    same_table(&koszul, &betti_gpd_int(&d)?, "betti-gpd-int")?;
    passed.push("betti-gpd-int");
    same_table(&koszul, &betti_corner(&d)?, "betti-corner")?;
    passed.push("betti-corner");

    let con = match families.con(grid, force) {
        Ok(f) => Some(f),
        Err(Error::ConCapExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    if let Some(con) = con.as_ref() {
        let (rk, dc) = diagram_par(module, con.clone())?;
        inversion(&rk, &dc, "con-inversion")?;
        passed.push("con-inversion");
        hilbert(module, &dc, "con-hilbert")?;
        passed.push("con-hilbert");
        monotone(&rk, &con.cover_table(), "con-monotone")?;
        passed.push("con-monotone");
        same_table(&koszul, &betti_gpd(&dc)?, "betti-gpd")?;
        passed.push("betti-gpd");
    }
    Ok(CheckReport {
        passed,
        con_checked: con.is_some(),
    })
}
