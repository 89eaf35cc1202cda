//! JSON documents for rank invariants, diagrams, barcodes and Betti tables.

use serde::{Deserialize, Serialize};

use gpd_core::betti::BettiTable;
use gpd_core::diagram::PersistenceDiagram;
use gpd_core::gridmod::Barcode;
use gpd_core::posets::{FamilyKind, Interval, PointSet, RegionFamily};
use gpd_core::rank::RankInvariant;
use gpd_core::{Grid, Point};

/// `{"rows":[[y,lo,hi],...]}` or `{"points":[[x,y],...]}`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum RegionJson {
    Rows { rows: Vec<[usize; 3]> },
    Points { points: Vec<[i64; 2]> },
}

impl RegionJson {
    pub fn interval(i: &Interval) -> Self {
        RegionJson::Rows {
            rows: i.rows().map(|(y, lo, hi)| [y, lo, hi]).collect(),
        }
    }

    pub fn points(set: &PointSet, grid: Grid) -> Self {
        RegionJson::Points {
            points: set.points(grid).into_iter().map(|p| [p.x, p.y]).collect(),
        }
    }

    fn of(family: &RegionFamily, i: usize) -> Self {
        match family.kind() {
            FamilyKind::Int => Self::interval(family.interval(i).expect("Int regions are intervals")),
            FamilyKind::Con => Self::points(family.set(i), family.grid()),
        }
    }

    pub fn to_set(&self, grid: Grid) -> Result<PointSet, String> {
        match self {
            RegionJson::Rows { .. } => Ok(self.to_interval()?.to_set(grid)),
            RegionJson::Points { points } => {
                PointSet::from_points(grid, points.iter().map(|&[x, y]| Point::new(x, y))).map_err(|e| e.to_string())
            }
        }
    }

    /// The interval this region describes, whichever encoding it uses.
    pub fn to_interval(&self) -> Result<Interval, String> {
        match self {
            RegionJson::Rows { rows } => {
                let rows: Vec<(usize, usize, usize)> = rows.iter().map(|&[y, lo, hi]| (y, lo, hi)).collect();
                Interval::from_rows(&rows).map_err(|e| e.to_string())
            }
            RegionJson::Points { points } => {
                let max_x = points.iter().map(|p| p[0]).max().unwrap_or(0).max(0) as usize;
                let max_y = points.iter().map(|p| p[1]).max().unwrap_or(0).max(0) as usize;
                let grid = Grid::new(max_x, max_y);
                let set = self.to_set(grid)?;
                Interval::from_set(grid, &set).ok_or_else(|| "region is not an interval".to_string())
            }
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct RankEntry {
    pub region: RegionJson,
    pub rank: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct RankJson {
    pub grid: [usize; 2],
    pub family: String,
    pub ranks: Vec<RankEntry>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct DiagramEntry {
    pub region: RegionJson,
    pub value: i64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct DiagramJson {
    pub grid: [usize; 2],
    pub poset: String,
    pub entries: Vec<DiagramEntry>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct BettiEntry {
    pub p: [i64; 2],
    pub b0: i64,
    pub b1: i64,
    pub b2: i64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct BettiJson {
    pub grid: [usize; 2],
    pub betti: Vec<BettiEntry>,
}

fn grid_pair(g: Grid) -> [usize; 2] {
    [g.m, g.n]
}

pub fn rank_json(rk: &RankInvariant) -> RankJson {
    let family = &rk.family;
    RankJson {
        grid: grid_pair(family.grid()),
        family: family.kind().as_str().into(),
        ranks: (0..family.len())
            .map(|i| RankEntry {
                region: RegionJson::of(family, i),
                rank: rk.ranks[i],
            })
            .collect(),
    }
}

/// Nonzero entries only unless `all`.
pub fn diagram_json(d: &PersistenceDiagram, all: bool) -> DiagramJson {
    let family = d.family();
    DiagramJson {
        grid: grid_pair(d.grid()),
        poset: d.kind().as_str().into(),
        entries: (0..family.len())
            .filter(|&i| all || d.get(i) != 0)
            .map(|i| DiagramEntry {
                region: RegionJson::of(family, i),
                value: d.get(i),
            })
            .collect(),
    }
}

/// A barcode written as an `Int` diagram.
pub fn barcode_json(grid: Grid, barcode: &Barcode) -> DiagramJson {
    let family = RegionFamily::intervals(grid);
    let mut entries: Vec<(usize, DiagramEntry)> = barcode
        .iter()
        .map(|(i, &mult)| {
            let idx = family
                .index_of(&i.to_set(grid))
                .expect("barcode intervals fit the grid");
            (
                idx,
                DiagramEntry {
                    region: RegionJson::interval(i),
                    value: mult as i64,
                },
            )
        })
        .collect();
    entries.sort_by_key(|e| e.0);
    DiagramJson {
        grid: grid_pair(grid),
        poset: FamilyKind::Int.as_str().into(),
        entries: entries.into_iter().map(|e| e.1).collect(),
    }
}

/// Nonzero triples only, in point order.
pub fn betti_json(t: &BettiTable) -> BettiJson {
    BettiJson {
        grid: grid_pair(t.grid()),
        betti: t
            .nonzero()
            .map(|(p, [b0, b1, b2])| BettiEntry {
                p: [p.x, p.y],
                b0,
                b1,
                b2,
            })
            .collect(),
    }
}

/// Pretty-printed with a trailing newline.
pub fn to_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}
