//! One-critical bifiltered simplicial complexes and their homology modules.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::gridmod::{Grid, GridModule, Point};
use crate::linalg::{Field, Matrix};

/// A simplex with its entrance grade.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplex {
    pub vertices: Vec<u32>,
    pub grade: Point,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// A finite simplicial complex filtered over `[m]×[n]`, one grade per simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bifiltration {
    grid: Grid,
    simplices: Vec<Simplex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BifViolation {
    /// Vertex list empty, unsorted or with repeats.
    Malformed {
        simplex: usize,
    },
    GradeOutOfGrid {
        simplex: usize,
    },
    Duplicate {
        simplex: usize,
        first: usize,
    },
    MissingFace {
        simplex: usize,
        face: Vec<u32>,
    },
    /// The face enters strictly later than (or incomparably to) the simplex.
    FaceAfterCoface {
        simplex: usize,
        face: usize,
    },
}

impl fmt::Display for BifViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BifViolation::Malformed { simplex } => write!(f, "simplex {simplex}: vertices must be sorted and distinct"),
            BifViolation::GradeOutOfGrid { simplex } => write!(f, "simplex {simplex}: grade outside the grid"),
            BifViolation::Duplicate { simplex, first } => write!(f, "simplex {simplex} duplicates simplex {first}"),
            BifViolation::MissingFace { simplex, face } => write!(f, "simplex {simplex}: face {face:?} is not listed"),
            BifViolation::FaceAfterCoface { simplex, face } => {
                write!(f, "simplex {simplex}: face {face} has a grade not below the simplex's")
            }
        }
    }
}

impl Bifiltration {
    /// Unvalidated; see [`Bifiltration::validate`].
    pub fn new(grid: Grid, simplices: Vec<Simplex>) -> Self {
        Bifiltration { grid, simplices }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    /// Every face-closure, monotonicity and well-formedness violation.
    pub fn validate(&self) -> Vec<BifViolation> {
        let mut out = Vec::new();
        let mut index: BTreeMap<&[u32], usize> = BTreeMap::new();
        for (i, s) in self.simplices.iter().enumerate() {
            if s.vertices.is_empty() || s.vertices.windows(2).any(|w| w[0] >= w[1]) {
                out.push(BifViolation::Malformed { simplex: i });
                continue;
            }
            if !self.grid.contains(s.grade) {
                out.push(BifViolation::GradeOutOfGrid { simplex: i });
            }
            if let Some(&first) = index.get(s.vertices.as_slice()) {
                out.push(BifViolation::Duplicate { simplex: i, first });
            } else {
                index.insert(&s.vertices, i);
            }
        }
        for (i, s) in self.simplices.iter().enumerate() {
            if s.vertices.len() < 2 || s.vertices.windows(2).any(|w| w[0] >= w[1]) {
                continue;
            }
            for skip in 0..s.vertices.len() {
                let face: Vec<u32> = s
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, v)| *v)
                    .collect();
                match index.get(face.as_slice()) {
                    None => out.push(BifViolation::MissingFace { simplex: i, face }),
                    Some(&j) if !self.simplices[j].grade.leq(s.grade) => {
                        out.push(BifViolation::FaceAfterCoface { simplex: i, face: j })
                    }
                    Some(_) => {}
                }
            }
        }
        out
    }

    /// Indices of the simplices present at `p`.
    pub fn complex_at(&self, p: Point) -> Vec<usize> {
        (0..self.simplices.len())
            .filter(|&i| self.simplices[i].grade.leq(p))
            .collect()
    }
}

/// `validate` as a free function.
pub fn validate_bif(b: &Bifiltration) -> Vec<BifViolation> {
    b.validate()
}

/// Deterministic homology basis at one grid point.
struct LocalHomology {
    // k-simplices present, as global indices into `ks`
    present: Vec<usize>,
    // columns: boundaries of present (k+1)-simplices, then cycle representatives
    span: Matrix,
    boundary_cols: usize,
    reps: Matrix,
}

/// `H_k` of the bifiltration as a grid module over `field`.
pub fn homology_module(b: &Bifiltration, k: usize, field: Field) -> Result<GridModule, Error> {
    let violations = b.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidBifiltration(violations.len()));
    }
    let grid = b.grid;
    let by_dim = |d: usize| -> Vec<usize> { (0..b.simplices.len()).filter(|&i| b.simplices[i].dim() == d).collect() };
    let ks = by_dim(k);
    let lower = if k == 0 { Vec::new() } else { by_dim(k - 1) };
    let upper = by_dim(k + 1);
    let position = |list: &[usize]| -> BTreeMap<Vec<u32>, usize> {
        list.iter()
            .enumerate()
            .map(|(pos, &i)| (b.simplices[i].vertices.clone(), pos))
            .collect()
    };
    let lower_pos = position(&lower);
    let k_pos = position(&ks);

    // boundary of simplex i as (row, coefficient) pairs in the given positions
    let boundary = |i: usize, pos: &BTreeMap<Vec<u32>, usize>| -> Vec<(usize, u16)> {
        let v = &b.simplices[i].vertices;
        if v.len() < 2 {
            return Vec::new();
        }
        (0..v.len())
            .map(|skip| {
                let face: Vec<u32> = v
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| *t != skip)
                    .map(|(_, x)| *x)
                    .collect();
                let sign = if skip % 2 == 0 { 1 } else { field.neg(1) };
                (pos[&face], sign)
            })
            .collect()
    };

    let local = |p: Point| -> LocalHomology {
        let present: Vec<usize> = (0..ks.len()).filter(|&c| b.simplices[ks[c]].grade.leq(p)).collect();
        let local_of: BTreeMap<usize, usize> = present.iter().enumerate().map(|(l, &c)| (c, l)).collect();
        let lower_present: Vec<usize> = (0..lower.len())
            .filter(|&r| b.simplices[lower[r]].grade.leq(p))
            .collect();
        let lower_of: BTreeMap<usize, usize> = lower_present.iter().enumerate().map(|(l, &r)| (r, l)).collect();
        let mut dk = Matrix::zeros(lower_present.len(), present.len());
        for (col, &c) in present.iter().enumerate() {
            for (r, s) in boundary(ks[c], &lower_pos) {
                dk.set(lower_of[&r], col, s);
            }
        }
        let cycles = field.kernel_basis(&dk);
        let up_present: Vec<usize> = upper.iter().copied().filter(|&i| b.simplices[i].grade.leq(p)).collect();
        let mut span = Matrix::zeros(present.len(), up_present.len());
        for (col, &i) in up_present.iter().enumerate() {
            for (r, s) in boundary(i, &k_pos) {
                span.set(local_of[&r], col, s);
            }
        }
        let boundary_cols = span.cols();
        let mut rank = field.rank(&span);
        let mut chosen = Vec::new();
        for c in 0..cycles.cols() {
            let z = cycles.select_columns(&[c]);
            let grown = span.hstack(&z);
            let r = field.rank(&grown);
            if r > rank {
                rank = r;
                span = grown;
                chosen.push(c);
            }
        }
        let reps = cycles.select_columns(&chosen);
        LocalHomology {
            present,
            span,
            boundary_cols,
            reps,
        }
    };

    let locals: Vec<LocalHomology> = grid.points().map(local).collect();
    let dims: Vec<usize> = locals.iter().map(|h| h.reps.cols()).collect();
    let mut module = GridModule::with_dims(grid, field, dims)?;

    // express each source representative in the target's basis
    let induced = |src: &LocalHomology, dst: &LocalHomology| -> Matrix {
        let h = src.reps.cols();
        let mut out = Matrix::zeros(dst.reps.cols(), h);
        if out.rows() == 0 || h == 0 {
            return out;
        }
        let dst_of: BTreeMap<usize, usize> = dst.present.iter().enumerate().map(|(l, &c)| (c, l)).collect();
        for col in 0..h {
            let mut v = vec![0u16; dst.present.len()];
            for (l, &c) in src.present.iter().enumerate() {
                v[dst_of[&c]] = src.reps.get(l, col);
            }
            let x = field
                .solve(&dst.span, &v)
                .expect("shapes agree")
                .expect("cycles stay cycles under inclusion");
            for r in 0..out.rows() {
                out.set(r, col, x[dst.boundary_cols + r]);
            }
        }
        out
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

/// Seeded random bifiltration: a random graph with some filled triangles,
/// grades raised along faces so the result is monotone.
pub fn random_bifiltration(seed: u64, grid: Grid, vertices: u32) -> Bifiltration {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut grade_of: BTreeMap<Vec<u32>, Point> = BTreeMap::new();
    let random_point = |rng: &mut rand_chacha::ChaCha8Rng| {
        Point::new(rng.gen_range(0..=grid.m) as i64, rng.gen_range(0..=grid.n) as i64)
    };
    let join = |a: Point, b: Point| Point::new(a.x.max(b.x), a.y.max(b.y));
    for v in 0..vertices {
        let g = random_point(&mut rng);
        grade_of.insert(vec![v], g);
    }
    for a in 0..vertices {
        for c in a + 1..vertices {
            if rng.gen_bool(0.5) {
                let g = join(random_point(&mut rng), join(grade_of[&vec![a]], grade_of[&vec![c]]));
                grade_of.insert(vec![a, c], g);
            }
        }
    }
    for a in 0..vertices {
        for c in a + 1..vertices {
            for d in c + 1..vertices {
                let edges = [vec![a, c], vec![a, d], vec![c, d]];
                if edges.iter().all(|e| grade_of.contains_key(e)) && rng.gen_bool(0.3) {
                    let g = edges
                        .iter()
                        .fold(random_point(&mut rng), |acc, e| join(acc, grade_of[e]));
                    grade_of.insert(vec![a, c, d], g);
                }
            }
        }
    }
    let mut simplices: Vec<Simplex> = grade_of
        .into_iter()
        .map(|(vertices, grade)| Simplex { vertices, grade })
        .collect();
    simplices.sort_by(|a, b| {
        a.vertices
            .len()
            .cmp(&b.vertices.len())
            .then_with(|| a.vertices.cmp(&b.vertices))
    });
    Bifiltration::new(grid, simplices)
}
