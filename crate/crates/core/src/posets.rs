//! Region families of the grid: intervals (`Int`) and connected regions
//! (`Con`), ordered by inclusion.
//!
//! A region is a [`PointSet`], a bitset over the grid's points in
//! lexicographic `(x, y)` order. Intervals additionally carry their staircase
//! form: contiguous rows `b..=t`, each a column range `lo[y]..=hi[y]`, with
//! both bounds weakly decreasing in `y` and consecutive rows overlapping.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::Error;
use crate::gridmod::{Grid, Point};

/// Bitset of grid points, indexed by [`Grid::index`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(grid: Grid) -> Self {
        PointSet {
            words: vec![0; grid.len().div_ceil(64).max(1)],
        }
    }

    pub fn full(grid: Grid) -> Self {
        let mut s = PointSet::empty(grid);
        for i in 0..grid.len() {
            s.insert(i);
        }
        s
    }

    pub fn from_points<I: IntoIterator<Item = Point>>(grid: Grid, points: I) -> Result<Self, Error> {
        let mut s = PointSet::empty(grid);
        for p in points {
            s.insert(grid.check(p)?);
        }
        Ok(s)
    }

    pub fn singleton(grid: Grid, p: Point) -> Result<Self, Error> {
        PointSet::from_points(grid, [p])
    }

    #[inline]
    pub fn insert(&mut self, idx: usize) {
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    #[inline]
    pub fn remove(&mut self, idx: usize) {
        self.words[idx / 64] &= !(1 << (idx % 64));
    }

    #[inline]
    pub fn contains(&self, idx: usize) -> bool {
        self.words.get(idx / 64).is_some_and(|w| w >> (idx % 64) & 1 == 1)
    }

    pub fn contains_point(&self, grid: Grid, p: Point) -> bool {
        grid.contains(p) && self.contains(grid.index(p))
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// `self ⊇ other`.
    pub fn contains_set(&self, other: &PointSet) -> bool {
        other.is_subset(self)
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Grid indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + bit)
            })
        })
    }

    /// Points in lexicographic order.
    pub fn points(&self, grid: Grid) -> Vec<Point> {
        self.iter().map(|i| grid.point(i)).collect()
    }

    /// Connected under unit steps `±e1`, `±e2`.
    pub fn is_connected(&self, grid: Grid) -> bool {
        let Some(start) = self.iter().next() else {
            return false;
        };
        let mut seen = PointSet::empty(grid);
        seen.insert(start);
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in grid.neighbors(i) {
                if self.contains(j) && !seen.contains(j) {
                    seen.insert(j);
                    stack.push(j);
                }
            }
        }
        seen == *self
    }

    /// `{q : a ≤ q ≤ b for some a, b in the set}`.
    pub fn convex_hull(&self, grid: Grid) -> PointSet {
        let pts = self.points(grid);
        let mut hull = PointSet::empty(grid);
        for q in grid.points() {
            if pts.iter().any(|a| a.leq(q)) && pts.iter().any(|b| q.leq(*b)) {
                hull.insert(grid.index(q));
            }
        }
        hull
    }
}

impl Ord for PointSet {
    /// Lexicographic comparison of the sorted point lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for PointSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A staircase interval of the grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    b: usize,
    t: usize,
    lo: Vec<usize>,
    hi: Vec<usize>,
}

impl Interval {
    /// Rows `b..b + lo.len()` with column ranges `lo[k]..=hi[k]`.
    pub fn new(b: usize, lo: Vec<usize>, hi: Vec<usize>) -> Result<Self, Error> {
        if lo.is_empty() {
            return Err(Error::InvalidInterval("no rows".into()));
        }
        if lo.len() != hi.len() {
            return Err(Error::InvalidInterval("lo and hi differ in length".into()));
        }
        for k in 0..lo.len() {
            if lo[k] > hi[k] {
                return Err(Error::InvalidInterval(format!("row {} has lo > hi", b + k)));
            }
            if k + 1 < lo.len() {
                if lo[k + 1] > lo[k] || hi[k + 1] > hi[k] {
                    return Err(Error::InvalidInterval(format!(
                        "rows {} and {} are not a staircase step",
                        b + k,
                        b + k + 1
                    )));
                }
                if lo[k] > hi[k + 1] {
                    return Err(Error::InvalidInterval(format!(
                        "rows {} and {} share no column",
                        b + k,
                        b + k + 1
                    )));
                }
            }
        }
        let t = b + lo.len() - 1;
        Ok(Interval { b, t, lo, hi })
    }

    /// Builds from `(y, lo, hi)` triples listed bottom to top.
    pub fn from_rows(rows: &[(usize, usize, usize)]) -> Result<Self, Error> {
        let Some(&(b, _, _)) = rows.first() else {
            return Err(Error::InvalidInterval("no rows".into()));
        };
        for (k, &(y, _, _)) in rows.iter().enumerate() {
            if y != b + k {
                return Err(Error::InvalidInterval("rows must be contiguous and increasing".into()));
            }
        }
        Interval::new(
            b,
            rows.iter().map(|r| r.1).collect(),
            rows.iter().map(|r| r.2).collect(),
        )
    }

    /// The staircase form of `set`, if it is one.
    pub fn from_set(grid: Grid, set: &PointSet) -> Option<Interval> {
        let mut rows: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
        for p in set.points(grid) {
            let (x, y) = (p.x as usize, p.y as usize);
            let e = rows.entry(y).or_insert((x, x, 0));
            e.0 = e.0.min(x);
            e.1 = e.1.max(x);
            e.2 += 1;
        }
        let mut triples = Vec::with_capacity(rows.len());
        for (&y, &(lo, hi, count)) in &rows {
            if count != hi - lo + 1 {
                return None;
            }
            triples.push((y, lo, hi));
        }
        Interval::from_rows(&triples).ok()
    }

    pub fn full(grid: Grid) -> Interval {
        Interval {
            b: 0,
            t: grid.n,
            lo: vec![0; grid.n + 1],
            hi: vec![grid.m; grid.n + 1],
        }
    }

    pub fn singleton(p: Point) -> Interval {
        let (x, y) = (p.x as usize, p.y as usize);
        Interval {
            b: y,
            t: y,
            lo: vec![x],
            hi: vec![x],
        }
    }

    pub fn bottom(&self) -> usize {
        self.b
    }

    pub fn top(&self) -> usize {
        self.t
    }

    /// `(y, lo, hi)` for each row, bottom to top.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (self.b..=self.t).map(move |y| (y, self.lo[y - self.b], self.hi[y - self.b]))
    }

    pub fn fits(&self, grid: Grid) -> bool {
        self.t <= grid.n && self.hi.iter().all(|&h| h <= grid.m)
    }

    pub fn check_grid(&self, grid: Grid) -> Result<(), Error> {
        if self.fits(grid) {
            Ok(())
        } else {
            Err(Error::InvalidInterval(format!(
                "interval does not fit in [{}]x[{}]",
                grid.m, grid.n
            )))
        }
    }

    pub fn len(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l + 1).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_point(&self, p: Point) -> bool {
        if p.x < 0 || p.y < 0 {
            return false;
        }
        let (x, y) = (p.x as usize, p.y as usize);
        y >= self.b && y <= self.t && self.lo[y - self.b] <= x && x <= self.hi[y - self.b]
    }

    pub fn points(&self) -> Vec<Point> {
        let mut pts: Vec<Point> = self
            .rows()
            .flat_map(|(y, lo, hi)| (lo..=hi).map(move |x| Point::new(x as i64, y as i64)))
            .collect();
        pts.sort();
        pts
    }

    pub fn to_set(&self, grid: Grid) -> PointSet {
        let mut s = PointSet::empty(grid);
        for (y, lo, hi) in self.rows() {
            for x in lo..=hi {
                s.insert(grid.index(Point::new(x as i64, y as i64)));
            }
        }
        s
    }

    /// Minimal elements, bottom row first (so `x` decreases along the list).
    pub fn minima(&self) -> Vec<Point> {
        self.rows()
            .filter(|&(y, lo, _)| y == self.b || lo < self.lo[y - 1 - self.b])
            .map(|(y, lo, _)| Point::new(lo as i64, y as i64))
            .collect()
    }

    /// Maximal elements, bottom row first.
    pub fn maxima(&self) -> Vec<Point> {
        self.rows()
            .filter(|&(y, _, hi)| y == self.t || hi > self.hi[y + 1 - self.b])
            .map(|(y, _, hi)| Point::new(hi as i64, y as i64))
            .collect()
    }
}

/// Which region family a diagram or rank invariant is indexed by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    Int,
    Con,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::Int => "int",
            FamilyKind::Con => "con",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Default cap on grid points for `Con` enumeration.
pub const CON_CAP: usize = 12;

/// A canonically ordered family of regions with fast lookup.
#[derive(Clone, Debug)]
pub struct RegionFamily {
    kind: FamilyKind,
    grid: Grid,
    sets: Vec<PointSet>,
    intervals: Vec<Option<Interval>>,
    lookup: BTreeMap<PointSet, usize>,
}

impl RegionFamily {
    fn build(kind: FamilyKind, grid: Grid, mut sets: Vec<PointSet>, ints: Option<Vec<Interval>>) -> Self {
        let intervals = match ints {
            Some(mut ints) => {
                ints.sort();
                sets = ints.iter().map(|i| i.to_set(grid)).collect();
                ints.into_iter().map(Some).collect()
            }
            None => {
                sets.sort();
                sets.iter().map(|s| Interval::from_set(grid, s)).collect()
            }
        };
        let lookup = sets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        RegionFamily {
            kind,
            grid,
            sets,
            intervals,
            lookup,
        }
    }

    /// `Int([m]×[n])` in canonical order.
    pub fn intervals(grid: Grid) -> Self {
        RegionFamily::build(FamilyKind::Int, grid, Vec::new(), Some(enumerate_intervals(grid)))
    }

    /// `Con([m]×[n])`, refused above `cap` grid points.
    pub fn connected(grid: Grid, cap: usize) -> Result<Self, Error> {
        Ok(RegionFamily::build(
            FamilyKind::Con,
            grid,
            enumerate_connected(grid, cap)?,
            None,
        ))
    }

    /// Connected regions inside `support`, e.g. a small zigzag of the grid.
    pub fn connected_within(grid: Grid, support: &PointSet) -> Self {
        RegionFamily::build(FamilyKind::Con, grid, connected_subsets(grid, support), None)
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn set(&self, i: usize) -> &PointSet {
        &self.sets[i]
    }

    pub fn sets(&self) -> &[PointSet] {
        &self.sets
    }

    /// Staircase form of region `i`, if it is an interval.
    pub fn interval(&self, i: usize) -> Option<&Interval> {
        self.intervals[i].as_ref()
    }

    pub fn is_interval(&self, i: usize) -> bool {
        self.intervals[i].is_some()
    }

    pub fn index_of(&self, set: &PointSet) -> Option<usize> {
        self.lookup.get(set).copied()
    }

    /// Region indices by decreasing size, ties in canonical order.
    pub fn by_decreasing_size(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| core::cmp::Reverse(self.sets[i].len()));
        order
    }

    /// For every region, the regions covering it in the family.
    pub fn cover_table(&self) -> Vec<Vec<usize>> {
        let mut by_size: Vec<usize> = (0..self.len()).collect();
        by_size.sort_by_key(|&i| self.sets[i].len());
        let mut table = vec![Vec::new(); self.len()];
        for (i, covers) in table.iter_mut().enumerate() {
            let base = &self.sets[i];
            let size = base.len();
            for &j in &by_size {
                let cand = &self.sets[j];
                if cand.len() <= size || !cand.contains_set(base) {
                    continue;
                }
                // size order: a non-minimal superset contains a cover already found
                if covers.iter().all(|&c: &usize| !cand.contains_set(&self.sets[c])) {
                    covers.push(j);
                }
            }
            covers.sort_unstable();
        }
        table
    }
}

/// Every staircase interval of the grid, each once, in canonical order.
pub fn enumerate_intervals(grid: Grid) -> Vec<Interval> {
    fn extend(grid: Grid, b: usize, lo: &mut Vec<usize>, hi: &mut Vec<usize>, out: &mut Vec<Interval>) {
        out.push(Interval {
            b,
            t: b + lo.len() - 1,
            lo: lo.clone(),
            hi: hi.clone(),
        });
        if b + lo.len() > grid.n {
            return;
        }
        let (plo, phi) = (*lo.last().unwrap(), *hi.last().unwrap());
        for l in 0..=plo {
            for h in l.max(plo)..=phi {
                lo.push(l);
                hi.push(h);
                extend(grid, b, lo, hi, out);
                lo.pop();
                hi.pop();
            }
        }
    }
    let mut out = Vec::new();
    for b in 0..=grid.n {
        for l in 0..=grid.m {
            for h in l..=grid.m {
                extend(grid, b, &mut vec![l], &mut vec![h], &mut out);
            }
        }
    }
    out.sort();
    out
}

/// Number of intervals of the grid, by dynamic programming over rows.
pub fn count_intervals(grid: Grid) -> u128 {
    let w = grid.m + 1;
    // cont[lo][hi]: staircases whose bottom row is (lo, hi) at the current y
    let mut cont = vec![vec![0u128; w]; w];
    let mut total = 0u128;
    for _y in (0..=grid.n).rev() {
        let mut next = vec![vec![0u128; w]; w];
        for lo in 0..w {
            for hi in lo..w {
                let mut c = 1u128;
                for l in 0..=lo {
                    for h in l.max(lo)..=hi {
                        c = c.saturating_add(cont[l][h]);
                    }
                }
                next[lo][hi] = c;
                total = total.saturating_add(c);
            }
        }
        cont = next;
    }
    total
}

/// Every nonempty unit-step-connected subset of the grid, in canonical order.
pub fn enumerate_connected(grid: Grid, cap: usize) -> Result<Vec<PointSet>, Error> {
    if grid.len() > cap {
        return Err(Error::ConCapExceeded {
            points: grid.len(),
            cap,
        });
    }
    let mut sets = connected_subsets(grid, &PointSet::full(grid));
    sets.sort();
    Ok(sets)
}

/// Connected induced subgraphs of the grid graph restricted to `support`,
/// each listed once (ESU enumeration anchored at the smallest vertex).
fn connected_subsets(grid: Grid, support: &PointSet) -> Vec<PointSet> {
    fn extend(
        grid: Grid,
        support: &PointSet,
        anchor: usize,
        sub: &mut PointSet,
        closed: &PointSet,
        ext: Vec<usize>,
        out: &mut Vec<PointSet>,
    ) {
        out.push(sub.clone());
        let mut ext = ext;
        while let Some(w) = ext.pop() {
            let mut next_ext = ext.clone();
            let mut next_closed = closed.clone();
            next_closed.insert(w);
            for u in grid.neighbors(w) {
                if u > anchor && support.contains(u) && !closed.contains(u) {
                    next_ext.push(u);
                }
                next_closed.insert(u);
            }
            sub.insert(w);
            extend(grid, support, anchor, sub, &next_closed, next_ext, out);
            sub.remove(w);
        }
    }
    let mut out = Vec::new();
    for v in support.iter() {
        let mut sub = PointSet::empty(grid);
        sub.insert(v);
        let mut closed = sub.clone();
        let mut ext = Vec::new();
        for u in grid.neighbors(v) {
            closed.insert(u);
            if u > v && support.contains(u) {
                ext.push(u);
            }
        }
        extend(grid, support, v, &mut sub, &closed, ext, &mut out);
    }
    out.sort();
    out
}

/// Intervals `J ⊋ I` with no interval strictly between.
pub fn covers_in_int(interval: &Interval, grid: Grid) -> Result<Vec<Interval>, Error> {
    interval.check_grid(grid)?;
    let family = RegionFamily::intervals(grid);
    let idx = family
        .index_of(&interval.to_set(grid))
        .expect("every grid interval is enumerated");
    Ok(family.cover_table()[idx]
        .iter()
        .map(|&j| family.interval(j).unwrap().clone())
        .collect())
}

/// Smallest interval containing every member of `set`.
///
/// When the union is connected its order-convex hull is the unique answer.
/// Otherwise the inclusion-minimal enumerated intervals containing the union
/// are searched, and more than one of them is reported as an error.
pub fn join(set: &[Interval], grid: Grid) -> Result<Interval, Error> {
    let Some(first) = set.first() else {
        return Err(Error::EmptyRegion);
    };
    let mut union = first.to_set(grid);
    for i in set {
        i.check_grid(grid)?;
        union = union.union(&i.to_set(grid));
    }
    let hull = union.convex_hull(grid);
    if let Some(i) = Interval::from_set(grid, &hull) {
        return Ok(i);
    }
    let supersets: Vec<Interval> = enumerate_intervals(grid)
        .into_iter()
        .filter(|i| i.to_set(grid).contains_set(&union))
        .collect();
    let minimal: Vec<&Interval> = supersets
        .iter()
        .filter(|i| {
            let s = i.to_set(grid);
            !supersets.iter().any(|k| k != *i && s.contains_set(&k.to_set(grid)))
        })
        .collect();
    match minimal.as_slice() {
        [one] => Ok((*one).clone()),
        _ => Err(Error::JoinAmbiguous {
            candidates: minimal.len(),
        }),
    }
}

/// Möbius function of the opposite inclusion order on a region family,
/// memoized one row `μ(J, ·)` at a time.
pub struct Mobius<'a> {
    family: &'a RegionFamily,
    rows: BTreeMap<usize, Vec<(usize, i64)>>,
}

impl<'a> Mobius<'a> {
    pub fn new(family: &'a RegionFamily) -> Self {
        Mobius {
            family,
            rows: BTreeMap::new(),
        }
    }

    /// `μ(J, I)` for `J ⊇ I`; zero otherwise.
    pub fn value(&mut self, j: usize, i: usize) -> i64 {
        let row = self.row(j);
        row.binary_search_by_key(&i, |e| e.0).map_or(0, |k| row[k].1)
    }

    /// Nonzero and zero values `μ(J, R)` for all `R ⊆ J`, sorted by `R`.
    pub fn row(&mut self, j: usize) -> &[(usize, i64)] {
        let family = self.family;
        self.rows.entry(j).or_insert_with(|| {
            let top = family.set(j);
            let mut below: Vec<usize> = (0..family.len()).filter(|&r| top.contains_set(family.set(r))).collect();
            below.sort_by_key(|&r| core::cmp::Reverse(family.set(r).len()));
            let mut values: Vec<(usize, i64)> = Vec::with_capacity(below.len());
            for &r in &below {
                let v = if r == j {
                    1
                } else {
                    // μ(J, R) = −Σ_{J ⊇ R' ⊋ R} μ(J, R')
                    let rs = family.set(r);
                    -values
                        .iter()
                        .filter(|&&(r2, _)| r2 != r && family.set(r2).contains_set(rs))
                        .map(|&(_, v)| v)
                        .sum::<i64>()
                };
                values.push((r, v));
            }
            values.sort_unstable_by_key(|e| e.0);
            values
        })
    }
}

/// Single `μ` evaluation; see [`Mobius`] for repeated queries.
pub fn mobius(family: &RegionFamily, j: usize, i: usize) -> i64 {
    Mobius::new(family).value(j, i)
}
