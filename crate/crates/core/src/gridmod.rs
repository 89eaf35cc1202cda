//! Persistence modules over the grid `[m]×[n] = {0..m}×{0..n}`.
//!
//! A [`GridModule`] stores a dimension per point and the structure maps along
//! the unit steps `e1 = (1,0)` and `e2 = (0,1)`. Matrices are target-indexed:
//! the map `M(p) → M(p+e1)` has `dim M(p+e1)` rows and `dim M(p)` columns.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::linalg::{Field, Matrix};
use crate::posets::{count_intervals, Interval, PointSet};
use crate::rank::FiniteDiagram;

/// A point of `ℤ²`. Orders lexicographically by `(x, y)`; use [`Point::leq`]
/// for the product order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    /// Product order `self ≤ other`.
    #[inline]
    pub fn leq(self, other: Point) -> bool {
        self.x <= other.x && self.y <= other.y
    }

    pub fn offset(self, dx: i64, dy: i64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Grid extents: points `(x, y)` with `0 ≤ x ≤ m`, `0 ≤ y ≤ n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grid {
    pub m: usize,
    pub n: usize,
}

impl Grid {
    pub const fn new(m: usize, n: usize) -> Self {
        Grid { m, n }
    }

    /// Number of points, `(m+1)(n+1)`.
    #[inline]
    pub fn len(&self) -> usize {
        (self.m + 1) * (self.n + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        p.x >= 0 && p.y >= 0 && p.x as usize <= self.m && p.y as usize <= self.n
    }

    /// Position of `p` in lexicographic order. `p` must lie in the grid.
    #[inline]
    pub fn index(&self, p: Point) -> usize {
        p.x as usize * (self.n + 1) + p.y as usize
    }

    #[inline]
    pub fn point(&self, idx: usize) -> Point {
        Point::new((idx / (self.n + 1)) as i64, (idx % (self.n + 1)) as i64)
    }

    pub fn check(&self, p: Point) -> Result<usize, Error> {
        if self.contains(p) {
            Ok(self.index(p))
        } else {
            Err(Error::OutOfGrid {
                x: p.x,
                y: p.y,
                m: self.m,
                n: self.n,
            })
        }
    }

    /// All points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Unit-step neighbors of the point with index `idx`.
    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let p = self.point(idx);
        [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .into_iter()
            .map(move |(dx, dy)| p.offset(dx, dy))
            .filter(move |q| self.contains(*q))
            .map(move |q| self.index(q))
    }

    /// The grid one step larger in each direction.
    pub fn expanded(&self) -> Grid {
        Grid::new(self.m + 1, self.n + 1)
    }
}

/// Anything that assigns a vector space to points and a linear map to
/// comparable pairs, functorially.
pub trait Representation {
    fn field(&self) -> Field;
    fn dim_at(&self, p: Point) -> usize;
    /// The structure map `M(p) → M(q)` for `p ≤ q`.
    fn map_between(&self, p: Point, q: Point) -> Matrix;
}

/// A violated module invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MapShape {
        axis: Axis,
        source: Point,
        expected: (usize, usize),
        found: (usize, usize),
    },
    NotCommutative {
        square: Point,
    },
    EntryOutOfField {
        axis: Axis,
        source: Point,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MapShape {
                axis,
                source,
                expected,
                found,
            } => write!(
                f,
                "map{} at {:?} has shape {}x{}, expected {}x{}",
                axis.as_str(),
                source,
                found.0,
                found.1,
                expected.0,
                expected.1
            ),
            Violation::NotCommutative { square } => {
                write!(f, "unit square at {:?} does not commute", square)
            }
            Violation::EntryOutOfField { axis, source } => {
                write!(f, "map{} at {:?} has an entry outside the field", axis.as_str(), source)
            }
        }
    }
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

/// A functor `[m]×[n] → vec` over GF(p).
#[derive(Clone, PartialEq, Eq)]
pub struct GridModule {
    grid: Grid,
    field: Field,
    dims: Vec<usize>,
    // mapx[x*(n+1)+y] for x < m; mapy[x*n+y] for y < n
    mapx: Vec<Matrix>,
    mapy: Vec<Matrix>,
}

impl fmt::Debug for GridModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridModule")
            .field("grid", &self.grid)
            .field("field", &self.field.modulus())
            .field("dims", &self.dims)
            .finish_non_exhaustive()
    }
}

impl GridModule {
    /// The zero module.
    pub fn zero(grid: Grid, field: Field) -> Self {
        GridModule {
            grid,
            field,
            dims: vec![0; grid.len()],
            mapx: vec![Matrix::zeros(0, 0); grid.m * (grid.n + 1)],
            mapy: vec![Matrix::zeros(0, 0); (grid.m + 1) * grid.n],
        }
    }

    /// Module with the given dimensions and zero maps everywhere.
    pub fn with_dims(grid: Grid, field: Field, dims: Vec<usize>) -> Result<Self, Error> {
        if dims.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: dims.len(),
            });
        }
        let mut module = GridModule::zero(grid, field);
        module.dims = dims;
        for p in grid.points() {
            if (p.x as usize) < grid.m {
                let t = module.dim(p.offset(1, 0));
                let slot = module.x_slot(p);
                module.mapx[slot] = Matrix::zeros(t, module.dim(p));
            }
            if (p.y as usize) < grid.n {
                let t = module.dim(p.offset(0, 1));
                let slot = module.y_slot(p);
                module.mapy[slot] = Matrix::zeros(t, module.dim(p));
            }
        }
        Ok(module)
    }

    /// Validated construction.
    pub fn new(
        grid: Grid,
        field: Field,
        dims: Vec<usize>,
        mapx: Vec<Matrix>,
        mapy: Vec<Matrix>,
    ) -> Result<Self, Error> {
        let module = GridModule::from_parts(grid, field, dims, mapx, mapy)?;
        let violations = module.validate();
        if violations.is_empty() {
            Ok(module)
        } else {
            Err(Error::InvalidModule(violations.len()))
        }
    }

    /// Assembles a module without checking shapes or commutativity; only the
    /// number of dims and maps is checked. Use [`GridModule::validate`].
    pub fn from_parts(
        grid: Grid,
        field: Field,
        dims: Vec<usize>,
        mapx: Vec<Matrix>,
        mapy: Vec<Matrix>,
    ) -> Result<Self, Error> {
        let counts = [
            (dims.len(), grid.len()),
            (mapx.len(), grid.m * (grid.n + 1)),
            (mapy.len(), (grid.m + 1) * grid.n),
        ];
        for (found, expected) in counts {
            if found != expected {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        Ok(GridModule {
            grid,
            field,
            dims,
            mapx,
            mapy,
        })
    }

    #[inline]
    fn x_slot(&self, p: Point) -> usize {
        p.x as usize * (self.grid.n + 1) + p.y as usize
    }

    #[inline]
    fn y_slot(&self, p: Point) -> usize {
        p.x as usize * self.grid.n + p.y as usize
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// `dim M(p)`; `p` must lie in the grid.
    #[inline]
    pub fn dim(&self, p: Point) -> usize {
        self.dims[self.grid.index(p)]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Hilbert function at a grid point.
    pub fn hilbert(&self, p: Point) -> Result<usize, Error> {
        Ok(self.dims[self.grid.check(p)?])
    }

    /// `M(p) → M(p+e1)`, for `p.x < m`.
    pub fn map_x(&self, p: Point) -> &Matrix {
        &self.mapx[self.x_slot(p)]
    }

    /// `M(p) → M(p+e2)`, for `p.y < n`.
    pub fn map_y(&self, p: Point) -> &Matrix {
        &self.mapy[self.y_slot(p)]
    }

    pub fn set_map_x(&mut self, p: Point, m: Matrix) {
        let slot = self.x_slot(p);
        self.mapx[slot] = m;
    }

    pub fn set_map_y(&mut self, p: Point, m: Matrix) {
        let slot = self.y_slot(p);
        self.mapy[slot] = m;
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Every shape and commutativity violation, in point order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let f = self.field;
        let in_field = |m: &Matrix| m.entries().iter().all(|&v| v < f.modulus());
        for p in self.grid.points() {
            let (x, y) = (p.x as usize, p.y as usize);
            if x < self.grid.m {
                let mat = self.map_x(p);
                let expected = (self.dim(p.offset(1, 0)), self.dim(p));
                if mat.shape() != expected {
                    out.push(Violation::MapShape {
                        axis: Axis::X,
                        source: p,
                        expected,
                        found: mat.shape(),
                    });
                } else if !in_field(mat) {
                    out.push(Violation::EntryOutOfField {
                        axis: Axis::X,
                        source: p,
                    });
                }
            }
            if y < self.grid.n {
                let mat = self.map_y(p);
                let expected = (self.dim(p.offset(0, 1)), self.dim(p));
                if mat.shape() != expected {
                    out.push(Violation::MapShape {
                        axis: Axis::Y,
                        source: p,
                        expected,
                        found: mat.shape(),
                    });
                } else if !in_field(mat) {
                    out.push(Violation::EntryOutOfField {
                        axis: Axis::Y,
                        source: p,
                    });
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for p in self.grid.points() {
            if (p.x as usize) < self.grid.m && (p.y as usize) < self.grid.n {
                let right_up = f.matmul(self.map_y(p.offset(1, 0)), self.map_x(p));
                let up_right = f.matmul(self.map_x(p.offset(0, 1)), self.map_y(p));
                if right_up != up_right {
                    out.push(Violation::NotCommutative { square: p });
                }
            }
        }
        out
    }

    /// Structure map `M(p) → M(q)` for grid points `p ≤ q`, composed along x then y.
    pub fn map(&self, p: Point, q: Point) -> Matrix {
        assert!(p.leq(q), "map requires p <= q");
        let f = self.field;
        let mut acc = Matrix::identity(self.dim(p));
        let mut cur = p;
        while cur.x < q.x {
            acc = f.matmul(self.map_x(cur), &acc);
            cur = cur.offset(1, 0);
        }
        while cur.y < q.y {
            acc = f.matmul(self.map_y(cur), &acc);
            cur = cur.offset(0, 1);
        }
        acc
    }

    /// The interval module `V_I`.
    pub fn interval_module(grid: Grid, interval: &Interval, field: Field) -> Result<Self, Error> {
        interval.check_grid(grid)?;
        let dims = grid.points().map(|p| usize::from(interval.contains_point(p))).collect();
        let mut module = GridModule::with_dims(grid, field, dims)?;
        for p in grid.points() {
            if !interval.contains_point(p) {
                continue;
            }
            if (p.x as usize) < grid.m && interval.contains_point(p.offset(1, 0)) {
                module.set_map_x(p, Matrix::identity(1));
            }
            if (p.y as usize) < grid.n && interval.contains_point(p.offset(0, 1)) {
                module.set_map_y(p, Matrix::identity(1));
            }
        }
        Ok(module)
    }

    /// `M ⊕ N` with block-diagonal maps, `M` first.
    pub fn direct_sum(&self, other: &GridModule) -> Result<GridModule, Error> {
        if self.grid != other.grid || self.field != other.field {
            return Err(Error::GridMismatch);
        }
        Ok(GridModule {
            grid: self.grid,
            field: self.field,
            dims: self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect(),
            mapx: self
                .mapx
                .iter()
                .zip(&other.mapx)
                .map(|(a, b)| a.block_diag(b))
                .collect(),
            mapy: self
                .mapy
                .iter()
                .zip(&other.mapy)
                .map(|(a, b)| a.block_diag(b))
                .collect(),
        })
    }

    /// Direct sum of interval modules, one summand per unit of multiplicity.
    pub fn from_barcode(grid: Grid, field: Field, barcode: &Barcode) -> Result<Self, Error> {
        let mut acc = GridModule::zero(grid, field);
        for (interval, &mult) in barcode {
            let v = GridModule::interval_module(grid, interval, field)?;
            for _ in 0..mult {
                acc = acc.direct_sum(&v)?;
            }
        }
        Ok(acc)
    }

    /// The cokernel of a map of free modules `F1 → F0`, evaluated pointwise.
    ///
    /// `relations[j] = (q_j, c_j)` sends the generator of `F1` at `q_j` to
    /// `Σ_i c_j[i] · g_i`; coefficient `i` may be nonzero only if `p_i ≤ q_j`.
    pub fn from_presentation(
        grid: Grid,
        field: Field,
        generators: &[Point],
        relations: &[(Point, Vec<i64>)],
    ) -> Result<Self, Error> {
        for &g in generators {
            grid.check(g)?;
        }
        for (j, (q, coeffs)) in relations.iter().enumerate() {
            grid.check(*q)?;
            if coeffs.len() != generators.len() {
                return Err(Error::CoefficientCount {
                    relation: j,
                    expected: generators.len(),
                    found: coeffs.len(),
                });
            }
            for (i, &c) in coeffs.iter().enumerate() {
                if field.reduce(c) != 0 && !generators[i].leq(*q) {
                    return Err(Error::NonHomogeneousRelation {
                        relation: j,
                        generator: i,
                    });
                }
            }
        }

        // Per point: active generators, quotient map and the generators kept as a basis.
        struct Local {
            gens: Vec<usize>,
            q: Matrix,
            basis: Vec<usize>,
        }
        let locals: Vec<Local> = grid
            .points()
            .map(|p| {
                let gens: Vec<usize> = (0..generators.len()).filter(|&i| generators[i].leq(p)).collect();
                let rels: Vec<usize> = (0..relations.len()).filter(|&j| relations[j].0.leq(p)).collect();
                let mut rel = Matrix::zeros(gens.len(), rels.len());
                for (c, &j) in rels.iter().enumerate() {
                    for (r, &i) in gens.iter().enumerate() {
                        rel.set(r, c, field.reduce(relations[j].1[i]));
                    }
                }
                let coker = field.cokernel(&rel);
                let (q, basis) = (coker.projection, coker.basis);
                Local { gens, q, basis }
            })
            .collect();
        let dims: Vec<usize> = locals.iter().map(|l| l.q.rows()).collect();
        let mut module = GridModule::with_dims(grid, field, dims)?;
        let induced = |from: &Local, to: &Local| {
            let mut mat = Matrix::zeros(to.q.rows(), from.q.rows());
            for (k, &c) in from.basis.iter().enumerate() {
                let gen = from.gens[c];
                let pos = to.gens.binary_search(&gen).expect("generators persist upward");
                for r in 0..to.q.rows() {
                    mat.set(r, k, to.q.get(r, pos));
                }
            }
            mat
        };
        for p in grid.points() {
            let here = &locals[grid.index(p)];
            if (p.x as usize) < grid.m {
                let there = &locals[grid.index(p.offset(1, 0))];
                module.set_map_x(p, induced(here, there));
            }
            if (p.y as usize) < grid.n {
                let there = &locals[grid.index(p.offset(0, 1))];
                module.set_map_y(p, induced(here, there));
            }
        }
        Ok(module)
    }

    /// The diagram `M|_S` over the induced order on `S`.
    pub fn restrict(&self, region: &PointSet) -> Result<FiniteDiagram, Error> {
        if region.is_empty() {
            return Err(Error::EmptyRegion);
        }
        restrict(self, &region.points(self.grid))
    }

    /// View as the encoded `ℤ²`-module.
    pub fn encoded(&self) -> EncodedModule<'_> {
        EncodedModule { base: self }
    }
}

impl Representation for GridModule {
    fn field(&self) -> Field {
        self.field
    }

    fn dim_at(&self, p: Point) -> usize {
        self.dim(p)
    }

    fn map_between(&self, p: Point, q: Point) -> Matrix {
        self.map(p, q)
    }
}

/// The `ℤ²`-module encoded by a grid module: zero off the positive quadrant,
/// otherwise the value at the largest grid point below.
#[derive(Clone, Copy, Debug)]
pub struct EncodedModule<'a> {
    base: &'a GridModule,
}

impl<'a> EncodedModule<'a> {
    pub fn base(&self) -> &'a GridModule {
        self.base
    }

    /// The grid point `p` clamps to, or `None` when `p ≱ (0,0)`.
    pub fn clamp(&self, p: Point) -> Option<Point> {
        if p.x < 0 || p.y < 0 {
            return None;
        }
        let g = self.base.grid;
        Some(Point::new(p.x.min(g.m as i64), p.y.min(g.n as i64)))
    }

    pub fn eval(&self, p: Point) -> usize {
        self.clamp(p).map_or(0, |q| self.base.dim(q))
    }
}

impl Representation for EncodedModule<'_> {
    fn field(&self) -> Field {
        self.base.field
    }

    fn dim_at(&self, p: Point) -> usize {
        self.eval(p)
    }

    fn map_between(&self, p: Point, q: Point) -> Matrix {
        assert!(p.leq(q), "map requires p <= q");
        match (self.clamp(p), self.clamp(q)) {
            (Some(a), Some(b)) => self.base.map(a, b),
            _ => Matrix::zeros(self.eval(q), self.eval(p)),
        }
    }
}

/// Restriction of a representation to a finite set of points, with an edge
/// for every cover relation of the induced order.
pub fn restrict<R: Representation + ?Sized>(rep: &R, points: &[Point]) -> Result<FiniteDiagram, Error> {
    if points.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let mut edges = Vec::new();
    for (i, &p) in pts.iter().enumerate() {
        for (j, &q) in pts.iter().enumerate() {
            if i == j || !p.leq(q) {
                continue;
            }
            let between = pts.iter().any(|&r| r != p && r != q && p.leq(r) && r.leq(q));
            if !between {
                edges.push((i, j, rep.map_between(p, q)));
            }
        }
    }
    let dims = pts.iter().map(|&p| rep.dim_at(p)).collect();
    Ok(FiniteDiagram::new(rep.field(), pts, dims, edges))
}

/// Multiset of intervals.
pub type Barcode = BTreeMap<Interval, usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RandomKind {
    IntervalSum,
    Presentation,
}

/// Seeded random module.
///
/// `IntervalSum` draws one to five intervals uniformly from all intervals of
/// the grid and returns their direct sum with its barcode. `Presentation`
/// draws up to four generators and up to four homogeneous relations.
pub fn random_module(seed: u64, grid: Grid, field: Field, kind: RandomKind) -> (GridModule, Option<Barcode>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        RandomKind::IntervalSum => {
            let sampler = IntervalSampler::new(grid);
            let k = rng.gen_range(1..=5);
            let mut barcode = Barcode::new();
            for _ in 0..k {
                *barcode.entry(sampler.sample(&mut rng)).or_insert(0) += 1;
            }
            let module = GridModule::from_barcode(grid, field, &barcode).expect("sampled intervals fit the grid");
            (module, Some(barcode))
        }
        RandomKind::Presentation => {
            let p = field.modulus() as i64;
            let random_point =
                |rng: &mut ChaCha8Rng| Point::new(rng.gen_range(0..=grid.m) as i64, rng.gen_range(0..=grid.n) as i64);
            let gens: Vec<Point> = (0..rng.gen_range(1..=4)).map(|_| random_point(&mut rng)).collect();
            let rels: Vec<(Point, Vec<i64>)> = (0..rng.gen_range(0..=4))
                .map(|_| {
                    let q = random_point(&mut rng);
                    let coeffs = gens
                        .iter()
                        .map(|g| if g.leq(q) { rng.gen_range(0..p) } else { 0 })
                        .collect();
                    (q, coeffs)
                })
                .collect();
            let module =
                GridModule::from_presentation(grid, field, &gens, &rels).expect("sampled presentation is homogeneous");
            (module, None)
        }
    }
}

/// Uniform sampler over the intervals of a grid, using completion counts
/// per `(row, lo, hi)` instead of materializing the family.
pub struct IntervalSampler {
    grid: Grid,
    // counts[y][lo][hi]: staircases whose lowest row is y with range lo..=hi
    counts: Vec<Vec<Vec<u128>>>,
    total: u128,
}

impl IntervalSampler {
    pub fn new(grid: Grid) -> Self {
        let w = grid.m + 1;
        let mut counts = vec![vec![vec![0u128; w]; w]; grid.n + 1];
        for y in (0..=grid.n).rev() {
            for lo in 0..w {
                for hi in lo..w {
                    let mut c = 1u128;
                    if y < grid.n {
                        for l in 0..=lo {
                            for h in l.max(lo)..=hi {
                                c = c.saturating_add(counts[y + 1][l][h]);
                            }
                        }
                    }
                    counts[y][lo][hi] = c;
                }
            }
        }
        let total = counts
            .iter()
            .flat_map(|rows| rows.iter().flat_map(|r| r.iter()))
            .fold(0u128, |a, &c| a.saturating_add(c));
        debug_assert!(total == count_intervals(grid) || total == u128::MAX);
        IntervalSampler { grid, counts, total }
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Interval {
        let w = self.grid.m + 1;
        let mut target = rng.gen_range(0..self.total);
        let mut start = None;
        'outer: for y in 0..=self.grid.n {
            for lo in 0..w {
                for hi in lo..w {
                    let c = self.counts[y][lo][hi];
                    if target < c {
                        start = Some((y, lo, hi));
                        break 'outer;
                    }
                    target -= c;
                }
            }
        }
        let (b, mut lo, mut hi) = start.expect("target below total");
        let (mut los, mut his) = (vec![lo], vec![hi]);
        let mut y = b;
        // target indexes the completions of the current prefix; 0 means stop here
        while target > 0 {
            target -= 1;
            let mut next = None;
            'scan: for l in 0..=lo {
                for h in l.max(lo)..=hi {
                    let c = self.counts[y + 1][l][h];
                    if target < c {
                        next = Some((l, h));
                        break 'scan;
                    }
                    target -= c;
                }
            }
            let (l, h) = next.expect("completion count covers target");
            los.push(l);
            his.push(h);
            lo = l;
            hi = h;
            y += 1;
        }
        Interval::new(b, los, his).expect("sampler walks staircases")
    }
}
