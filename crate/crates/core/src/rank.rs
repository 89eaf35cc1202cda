//! Limits, colimits and the generalized rank invariant.
//!
//! For a diagram over a finite connected poset, the limit is the space of
//! compatible families `(v_p)` inside `⊕ M(p)` and the colimit is `⊕ M(p)`
//! modulo `ι_p v − ι_q φ(p,q) v`. The generalized rank is the rank of the
//! canonical map `lim → colim`, which factors as `ι_p ∘ π_p` for any `p`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::gridmod::{restrict, EncodedModule, GridModule, Point};
use crate::linalg::{Field, Matrix};
use crate::posets::{Interval, PointSet, RegionFamily};

/// Vector spaces on finitely many points with maps along cover relations.
#[derive(Clone, Debug)]
pub struct FiniteDiagram {
    field: Field,
    points: Vec<Point>,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    edges: Vec<(usize, usize, Matrix)>,
}

impl FiniteDiagram {
    /// `edges[k] = (i, j, A)` is the map `A : M(points[i]) → M(points[j])`.
    pub fn new(field: Field, points: Vec<Point>, dims: Vec<usize>, edges: Vec<(usize, usize, Matrix)>) -> Self {
        let mut offsets = Vec::with_capacity(dims.len() + 1);
        let mut acc = 0;
        for &d in &dims {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);
        FiniteDiagram {
            field,
            points,
            dims,
            offsets,
            edges,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn edges(&self) -> &[(usize, usize, Matrix)] {
        &self.edges
    }

    /// Dimension of `⊕_p M(p)`.
    pub fn total_dim(&self) -> usize {
        self.offsets[self.dims.len()]
    }

    /// Coordinate block of point `i` inside `⊕_p M(p)`.
    pub fn block(&self, i: usize) -> core::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Connected through its edges (ignoring direction).
    pub fn is_connected(&self) -> bool {
        if self.points.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.len()];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            for &(a, b, _) in &self.edges {
                for (u, v) in [(a, b), (b, a)] {
                    if u == i && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// The limit and colimit of a diagram, as data inside `⊕_p M(p)`.
#[derive(Clone, Debug)]
pub struct DiagramCone {
    pub limit_basis: Matrix,
    pub colimit_projection: Matrix,
    pub colimit_dim: usize,
}

/// Columns spanning `{(v_p) : φ(p,q) v_p = v_q on every edge}`.
pub fn limit(d: &FiniteDiagram) -> Matrix {
    let f = d.field;
    let rows: usize = d.edges.iter().map(|(_, j, _)| d.dims[*j]).sum();
    let mut constraints = Matrix::zeros(rows, d.total_dim());
    let mut r0 = 0;
    for (i, j, map) in &d.edges {
        constraints.write_block(r0, d.offsets[*i], map);
        for k in 0..d.dims[*j] {
            let c = d.offsets[*j] + k;
            let v = f.sub(constraints.get(r0 + k, c), 1);
            constraints.set(r0 + k, c, v);
        }
        r0 += d.dims[*j];
    }
    f.kernel_basis(&constraints)
}

/// Quotient of `⊕_p M(p)` by the relations `ι_p v − ι_q φ(p,q) v`.
pub fn colimit(d: &FiniteDiagram) -> (Matrix, usize) {
    let f = d.field;
    let cols: usize = d.edges.iter().map(|(i, _, _)| d.dims[*i]).sum();
    let mut relations = Matrix::zeros(d.total_dim(), cols);
    let mut c0 = 0;
    for (i, j, map) in &d.edges {
        for k in 0..d.dims[*i] {
            relations.set(d.offsets[*i] + k, c0 + k, 1);
            for r in 0..d.dims[*j] {
                relations.set(d.offsets[*j] + r, c0 + k, f.neg(map.get(r, k)));
            }
        }
        c0 += d.dims[*i];
    }
    f.cokernel_projection(&relations)
}

pub fn cone(d: &FiniteDiagram) -> DiagramCone {
    let (colimit_projection, colimit_dim) = colimit(d);
    DiagramCone {
        limit_basis: limit(d),
        colimit_projection,
        colimit_dim,
    }
}

/// Rank of `lim → M(p) → colim` through the point at index `base`.
pub fn canonical_rank_at(d: &FiniteDiagram, base: usize) -> usize {
    let cone = cone(d);
    rank_through(d, &cone, base)
}

fn rank_through(d: &FiniteDiagram, cone: &DiagramCone, base: usize) -> usize {
    let block = d.block(base);
    let pi = cone.limit_basis.submatrix(block.clone(), 0..cone.limit_basis.cols());
    let iota = cone.colimit_projection.submatrix(0..cone.colimit_dim, block);
    d.field.rank(&d.field.matmul(&iota, &pi))
}

/// Rank of the canonical map, through the lexicographically smallest point.
pub fn canonical_rank(d: &FiniteDiagram) -> usize {
    let base = (0..d.len()).min_by_key(|&i| d.points[i]).expect("diagram is nonempty");
    canonical_rank_at(d, base)
}

/// `rk(M)(S)` for a unit-step-connected region `S`.
pub fn generalized_rank(module: &GridModule, region: &PointSet) -> Result<usize, Error> {
    let grid = module.grid();
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if !region.is_connected(grid) {
        return Err(Error::Disconnected);
    }
    if region.iter().any(|i| module.dims()[i] == 0) {
        return Ok(0);
    }
    Ok(canonical_rank(&module.restrict(region)?))
}

/// `rk(M)(I)` for an interval, from the limit over the lower fence and the
/// colimit over the upper fence.
///
/// The lower fence is the zigzag of minimal elements joined through the
/// joins of consecutive minima; every section over it extends uniquely to
/// `I`. Dually for the upper fence, maxima and meets of consecutive maxima.
pub fn interval_rank(module: &GridModule, interval: &Interval) -> usize {
    let f = module.field();
    if interval.points().iter().any(|&p| module.dim(p) == 0) {
        return 0;
    }
    let mins = interval.minima();
    let maxs = interval.maxima();

    // limit over m1 ≤ j1 ≥ m2 ≤ ...: kernel of the bidiagonal constraint map
    let min_dims: Vec<usize> = mins.iter().map(|&p| module.dim(p)).collect();
    let min_off: Vec<usize> = prefix_sums(&min_dims);
    let join_rows: usize = mins.windows(2).map(|w| module.dim(Point::new(w[0].x, w[1].y))).sum();
    let mut constraints = Matrix::zeros(join_rows, min_off[mins.len()]);
    let mut r0 = 0;
    for (k, w) in mins.windows(2).enumerate() {
        let join = Point::new(w[0].x, w[1].y);
        let left = module.map(w[0], join);
        let right = module.map(w[1], join);
        constraints.write_block(r0, min_off[k], &left);
        let mut neg = right.clone();
        for r in 0..neg.rows() {
            for c in 0..neg.cols() {
                neg.set(r, c, f.neg(right.get(r, c)));
            }
        }
        constraints.write_block(r0, min_off[k + 1], &neg);
        r0 += left.rows();
    }
    let lim = f.kernel_basis(&constraints);
    if lim.cols() == 0 {
        return 0;
    }

    // colimit over M1 ≥ w1 ≤ M2 ≥ ...: cokernel of the relation map
    let max_dims: Vec<usize> = maxs.iter().map(|&p| module.dim(p)).collect();
    let max_off: Vec<usize> = prefix_sums(&max_dims);
    let meet_cols: usize = maxs.windows(2).map(|w| module.dim(Point::new(w[1].x, w[0].y))).sum();
    let mut relations = Matrix::zeros(max_off[maxs.len()], meet_cols);
    let mut c0 = 0;
    for (k, w) in maxs.windows(2).enumerate() {
        let meet = Point::new(w[1].x, w[0].y);
        let up = module.map(meet, w[0]);
        let right = module.map(meet, w[1]);
        relations.write_block(max_off[k], c0, &up);
        for r in 0..right.rows() {
            for c in 0..right.cols() {
                relations.set(max_off[k + 1] + r, c0 + c, f.neg(right.get(r, c)));
            }
        }
        c0 += up.cols();
    }
    let (q, colim_dim) = f.cokernel_projection(&relations);
    if colim_dim == 0 {
        return 0;
    }

    // through the first minimum (lo[b], b) and the first maximum above it
    let m1 = mins[0];
    let (top_idx, top) = maxs
        .iter()
        .enumerate()
        .find(|(_, mx)| m1.leq(**mx))
        .map(|(i, &mx)| (i, mx))
        .expect("some maximum lies above the bottom-left minimum");
    let pi = lim.submatrix(min_off[0]..min_off[1], 0..lim.cols());
    let iota = q.submatrix(0..colim_dim, max_off[top_idx]..max_off[top_idx + 1]);
    let through = f.matmul(&f.matmul(&iota, &module.map(m1, top)), &pi);
    f.rank(&through)
}

fn prefix_sums(v: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(v.len() + 1);
    let mut acc = 0;
    out.push(0);
    for &d in v {
        acc += d;
        out.push(acc);
    }
    out
}

/// The generalized rank invariant over a region family.
#[derive(Clone, Debug)]
pub struct RankInvariant {
    pub family: Arc<RegionFamily>,
    pub ranks: Vec<usize>,
}

impl RankInvariant {
    pub fn get(&self, region: &PointSet) -> Option<usize> {
        self.family.index_of(region).map(|i| self.ranks[i])
    }
}

/// Rank of region `i` of the family; intervals take the fence path.
pub fn family_rank(module: &GridModule, family: &RegionFamily, i: usize) -> usize {
    match family.interval(i) {
        Some(interval) => interval_rank(module, interval),
        None => generalized_rank(module, family.set(i)).expect("family regions are connected"),
    }
}

/// `rk(M)` on every region of `family`, in canonical order.
pub fn rank_invariant(module: &GridModule, family: Arc<RegionFamily>) -> Result<RankInvariant, Error> {
    if family.grid() != module.grid() {
        return Err(Error::FamilyGridMismatch);
    }
    let ranks = (0..family.len()).map(|i| family_rank(module, &family, i)).collect();
    Ok(RankInvariant { family, ranks })
}

/// Generalized rank of an encoded module on a finite set of `ℤ²` points.
pub fn encoded_rank(e: &EncodedModule<'_>, points: &[Point]) -> usize {
    if points.iter().any(|&p| e.eval(p) == 0) {
        return 0;
    }
    let d = restrict(e, points).expect("points are nonempty");
    canonical_rank(&d)
}

/// Multiplicities `(n_p, m_p)` of `{p}` in the barcodes of the zigzags
/// `p−e1 ≤ p ≥ p−e2` and `p+e1 ≥ p ≤ p+e2`, by inclusion–exclusion of ranks.
pub fn zigzag_corner_mults(e: &EncodedModule<'_>, p: Point) -> (i64, i64) {
    let rk = |pts: &[Point]| encoded_rank(e, pts) as i64;
    let (l, d) = (p.offset(-1, 0), p.offset(0, -1));
    let n_p = rk(&[p]) - rk(&[l, p]) - rk(&[p, d]) + rk(&[l, p, d]);
    let (r, u) = (p.offset(1, 0), p.offset(0, 1));
    let m_p = rk(&[p]) - rk(&[p, r]) - rk(&[p, u]) + rk(&[r, p, u]);
    (n_p, m_p)
}

/// Limit computed from every comparable pair instead of covers only.
#[doc(hidden)]
pub fn limit_all_relations(module: &GridModule, region: &PointSet) -> Matrix {
    let grid = module.grid();
    let pts = region.points(grid);
    let mut edges = Vec::new();
    for (i, &p) in pts.iter().enumerate() {
        for (j, &q) in pts.iter().enumerate() {
            if i != j && p.leq(q) {
                edges.push((i, j, module.map(p, q)));
            }
        }
    }
    let dims = pts.iter().map(|&p| module.dim(p)).collect();
    limit(&FiniteDiagram::new(module.field(), pts, dims, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmod::{random_module, Grid, RandomKind};
    use crate::posets::{enumerate_intervals, CON_CAP};

    const F2: Field = Field::GF2;

    fn p(x: i64, y: i64) -> Point {
        Point::new(x, y)
    }

    fn wedge(top: [u16; 2], other: [u16; 2]) -> FiniteDiagram {
        // a ←A- c -B→ b, with c the minimum
        let a = Matrix::from_vec(1, 2, top.to_vec());
        let b = Matrix::from_vec(1, 2, other.to_vec());
        FiniteDiagram::new(
            F2,
            vec![p(0, 1), p(0, 0), p(1, 0)],
            vec![1, 2, 1],
            vec![(1, 0, a), (1, 2, b)],
        )
    }

    #[test]
    fn singleton_limit_and_colimit() {
        let d = FiniteDiagram::new(F2, vec![p(0, 0)], vec![3], vec![]);
        assert_eq!(limit(&d), Matrix::identity(3));
        assert_eq!(colimit(&d), (Matrix::identity(3), 3));
    }

    #[test]
    fn wedge_limit_is_the_minimum() {
        let d = wedge([1, 0], [1, 1]);
        let lim = limit(&d);
        assert_eq!(lim.cols(), 2);
        // v_a = A v_c and v_b = B v_c
        let constraints = Matrix::from_vec(2, 4, vec![1, 1, 0, 0, 0, 1, 1, 1]);
        assert!(F2.matmul(&constraints, &lim).is_zero());
    }

    #[test]
    fn pushout_colimit_vanishes() {
        // 𝔽 ← 𝔽² → 𝔽 with functionals [1 0], [1 1]: jointly injective
        let d = wedge([1, 0], [1, 1]);
        let (_, dim) = colimit(&d);
        assert_eq!(dim, 0);
        // same functional twice identifies everything into one copy of 𝔽
        let d = wedge([1, 0], [1, 0]);
        assert_eq!(colimit(&d).1, 1);
    }

    #[test]
    fn colimit_of_region_with_maximum() {
        let g = Grid::new(2, 2);
        let (m, _) = random_module(5, g, F2, RandomKind::Presentation);
        let region = Interval::from_rows(&[(0, 1, 2), (1, 0, 2), (2, 0, 2)]).unwrap();
        let d = m.restrict(&region.to_set(g)).unwrap();
        assert_eq!(colimit(&d).1, m.dim(p(2, 2)));
        let full = Interval::full(g).to_set(g);
        assert_eq!(limit(&m.restrict(&full).unwrap()).cols(), m.dim(p(0, 0)));
    }

    #[test]
    fn cone_annihilates_relations() {
        let g = Grid::new(2, 2);
        for seed in 0..20 {
            let (m, _) = random_module(seed, g, F2, RandomKind::Presentation);
            let d = m.restrict(&PointSet::full(g)).unwrap();
            let c = cone(&d);
            for (i, j, map) in d.edges() {
                let si = c.limit_basis.submatrix(d.block(*i), 0..c.limit_basis.cols());
                let sj = c.limit_basis.submatrix(d.block(*j), 0..c.limit_basis.cols());
                assert_eq!(F2.matmul(map, &si), sj);
                let qi = c.colimit_projection.submatrix(0..c.colimit_dim, d.block(*i));
                let qj = c.colimit_projection.submatrix(0..c.colimit_dim, d.block(*j));
                assert_eq!(qi, F2.matmul(&qj, map));
            }
        }
    }

    #[test]
    fn rank_examples() {
        let g = Grid::new(2, 2);
        let full = GridModule::interval_module(g, &Interval::full(g), F2).unwrap();
        assert_eq!(generalized_rank(&full, &PointSet::full(g)).unwrap(), 1);
        let zero = GridModule::zero(g, F2);
        assert_eq!(generalized_rank(&zero, &PointSet::full(g)).unwrap(), 0);
        let disconnected = PointSet::from_points(g, [p(0, 0), p(2, 2)]).unwrap();
        assert_eq!(generalized_rank(&full, &disconnected), Err(Error::Disconnected));
    }

    #[test]
    fn base_point_independence() {
        let g = Grid::new(2, 2);
        let con = RegionFamily::connected(g, CON_CAP).unwrap();
        for seed in 0..8 {
            let (m, _) = random_module(seed, g, Field::new(3).unwrap(), RandomKind::Presentation);
            for s in con.sets().iter().step_by(7) {
                let d = m.restrict(s).unwrap();
                let r = canonical_rank(&d);
                for base in 0..d.len() {
                    assert_eq!(canonical_rank_at(&d, base), r);
                }
            }
        }
    }

    #[test]
    fn cover_constraints_match_all_relations() {
        let g = Grid::new(2, 2);
        let con = RegionFamily::connected(g, CON_CAP).unwrap();
        for seed in 0..6 {
            let (m, _) = random_module(seed, g, F2, RandomKind::Presentation);
            for s in con.sets() {
                let covers = limit(&m.restrict(s).unwrap());
                let all = limit_all_relations(&m, s);
                assert_eq!(covers, all);
            }
        }
    }

    #[test]
    fn fence_path_matches_general_construction() {
        for (mm, nn) in [(1, 1), (2, 2), (3, 2)] {
            let g = Grid::new(mm, nn);
            let ints = enumerate_intervals(g);
            for seed in 0..10 {
                for kind in [RandomKind::IntervalSum, RandomKind::Presentation] {
                    let (m, _) = random_module(seed, g, Field::new(3).unwrap(), kind);
                    for i in &ints {
                        let general = canonical_rank(&m.restrict(&i.to_set(g)).unwrap());
                        assert_eq!(interval_rank(&m, i), general, "{i:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn interval_modules_follow_containment() {
        let g = Grid::new(2, 2);
        let con = RegionFamily::connected(g, CON_CAP).unwrap();
        for j in enumerate_intervals(g) {
            let v = GridModule::interval_module(g, &j, F2).unwrap();
            let js = j.to_set(g);
            for s in con.sets() {
                assert_eq!(generalized_rank(&v, s).unwrap(), usize::from(s.is_subset(&js)));
            }
        }
    }

    #[test]
    fn singleton_rank_is_hilbert() {
        let g = Grid::new(3, 2);
        for seed in 0..10 {
            let (m, _) = random_module(seed, g, F2, RandomKind::Presentation);
            for q in g.points() {
                let s = PointSet::singleton(g, q).unwrap();
                assert_eq!(generalized_rank(&m, &s).unwrap(), m.dim(q));
            }
        }
    }

    #[test]
    fn zigzag_mults_of_unit_square() {
        let g = Grid::new(1, 1);
        let v = GridModule::interval_module(g, &Interval::singleton(p(0, 0)), F2).unwrap();
        let e = v.encoded();
        assert_eq!(zigzag_corner_mults(&e, p(0, 0)), (1, 1));
        assert_eq!(zigzag_corner_mults(&e, p(1, 1)), (0, 0));
    }

    #[test]
    fn zigzag_mults_of_free_module() {
        let g = Grid::new(3, 3);
        let q = p(1, 2);
        let free = GridModule::from_presentation(g, F2, &[q], &[]).unwrap();
        let e = free.encoded();
        for x in -1..=4 {
            for y in -1..=4 {
                let (n_p, m_p) = zigzag_corner_mults(&e, p(x, y));
                assert_eq!(n_p, i64::from(p(x, y) == q));
                assert_eq!(m_p, 0);
            }
        }
    }
}
