//! Dense linear algebra over a prime field GF(p).
//!
//! Matrices store residues in `[0, p)` row-major. All routines go through the
//! reduced row echelon form, which is unique, so every basis and quotient map
//! produced here is reproducible bit-for-bit. Over GF(2) elimination runs on
//! packed 64-bit rows.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;

/// A prime field GF(p) with `p < 2^16`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    p: u16,
}

impl Default for Field {
    fn default() -> Self {
        Field { p: 2 }
    }
}

impl Field {
    pub const GF2: Field = Field { p: 2 };

    pub fn new(p: u32) -> Result<Self, Error> {
        if p >= 1 << 16 || !is_prime(p) {
            return Err(Error::InvalidField(p));
        }
        Ok(Field { p: p as u16 })
    }

    #[inline]
    pub fn modulus(self) -> u16 {
        self.p
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u16 {
        v.rem_euclid(self.p as i64) as u16
    }

    #[inline]
    pub fn add(self, a: u16, b: u16) -> u16 {
        ((a as u32 + b as u32) % self.p as u32) as u16
    }

    #[inline]
    pub fn sub(self, a: u16, b: u16) -> u16 {
        ((a as u32 + self.p as u32 - b as u32) % self.p as u32) as u16
    }

    #[inline]
    pub fn neg(self, a: u16) -> u16 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u16, b: u16) -> u16 {
        ((a as u32 * b as u32) % self.p as u32) as u16
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(self, a: u16) -> u16 {
        debug_assert!(a != 0, "zero has no inverse");
        // a^(p-2) by square-and-multiply
        let mut base = a as u64;
        let mut exp = self.p as u64 - 2;
        let modulus = self.p as u64;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % modulus;
            }
            base = base * base % modulus;
            exp >>= 1;
        }
        acc as u16
    }

    pub fn matmul(self, a: &Matrix, b: &Matrix) -> Matrix {
        assert_eq!(a.cols, b.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(a.rows, b.cols);
        let p = self.p as u32;
        for i in 0..a.rows {
            for k in 0..a.cols {
                let aik = a.get(i, k) as u32;
                if aik == 0 {
                    continue;
                }
                let row_b = &b.data[k * b.cols..(k + 1) * b.cols];
                let row_o = &mut out.data[i * b.cols..(i + 1) * b.cols];
                for (o, &bkj) in row_o.iter_mut().zip(row_b) {
                    *o = ((*o as u32 + aik * bkj as u32) % p) as u16;
                }
            }
        }
        out
    }

    pub fn apply(self, a: &Matrix, v: &[u16]) -> Vec<u16> {
        assert_eq!(a.cols, v.len(), "apply shape mismatch");
        (0..a.rows)
            .map(|i| {
                let mut acc = 0u32;
                for (j, &x) in v.iter().enumerate() {
                    acc = (acc + a.get(i, j) as u32 * x as u32) % self.p as u32;
                }
                acc as u16
            })
            .collect()
    }

    /// Reduced row echelon form with the pivot column of each nonzero row.
    pub fn rref(self, a: &Matrix) -> Rref {
        if self.p == 2 {
            return rref_gf2(a);
        }
        self.rref_generic(a)
    }

    fn rref_generic(self, a: &Matrix) -> Rref {
        let mut mat = a.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..mat.cols {
            if row == mat.rows {
                break;
            }
            let Some(sel) = (row..mat.rows).find(|&r| mat.get(r, col) != 0) else {
                continue;
            };
            mat.swap_rows(row, sel);
            let inv = self.inv(mat.get(row, col));
            if inv != 1 {
                for j in col..mat.cols {
                    let v = mat.get(row, j);
                    mat.set(row, j, self.mul(v, inv));
                }
            }
            for r in 0..mat.rows {
                if r == row {
                    continue;
                }
                let factor = mat.get(r, col);
                if factor == 0 {
                    continue;
                }
                for j in col..mat.cols {
                    let v = self.sub(mat.get(r, j), self.mul(factor, mat.get(row, j)));
                    mat.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { mat, pivots }
    }

    pub fn rank(self, a: &Matrix) -> usize {
        if a.rows == 0 || a.cols == 0 {
            return 0;
        }
        if self.p == 2 {
            return rank_gf2(a);
        }
        self.rref(a).pivots.len()
    }

    /// Columns form a basis of `{x : Ax = 0}`.
    pub fn kernel_basis(self, a: &Matrix) -> Matrix {
        let rref = self.rref(a);
        let free: Vec<usize> = free_columns(&rref.pivots, a.cols);
        let mut basis = Matrix::zeros(a.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis.set(f, k, 1);
            for (i, &pc) in rref.pivots.iter().enumerate() {
                basis.set(pc, k, self.neg(rref.mat.get(i, f)));
            }
        }
        basis
    }

    /// Quotient map onto `coker(A)`, returned with the cokernel dimension.
    pub fn cokernel_projection(self, a: &Matrix) -> (Matrix, usize) {
        let c = self.cokernel(a);
        let dim = c.basis.len();
        (c.projection, dim)
    }

    /// Cokernel of `A` in the basis given by the coordinates that are not
    /// pivots of the echelon form of `Aᵀ`.
    pub fn cokernel(self, a: &Matrix) -> Cokernel {
        let rref = self.rref(&a.transpose());
        let basis = free_columns(&rref.pivots, a.rows);
        let mut projection = Matrix::zeros(basis.len(), a.rows);
        for (k, &c) in basis.iter().enumerate() {
            projection.set(k, c, 1);
            for (i, &pc) in rref.pivots.iter().enumerate() {
                projection.set(k, pc, self.neg(rref.mat.get(i, c)));
            }
        }
        Cokernel { projection, basis }
    }

    /// Some `x` with `Ax = b`, or `None` when the system is inconsistent.
    pub fn solve(self, a: &Matrix, b: &[u16]) -> Result<Option<Vec<u16>>, Error> {
        if b.len() != a.rows {
            return Err(Error::DimensionMismatch {
                expected: a.rows,
                found: b.len(),
            });
        }
        let rhs = Matrix::from_vec(b.len(), 1, b.to_vec());
        Ok(self.solve_many(a, &rhs)?.map(|x| x.data))
    }

    /// Solves `AX = B` column by column; `None` if any column is unsolvable.
    pub fn solve_many(self, a: &Matrix, b: &Matrix) -> Result<Option<Matrix>, Error> {
        if b.rows != a.rows {
            return Err(Error::DimensionMismatch {
                expected: a.rows,
                found: b.rows,
            });
        }
        let aug = a.hstack(b);
        let rref = self.rref(&aug);
        if rref.pivots.iter().any(|&c| c >= a.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(a.cols, b.cols);
        for (i, &pc) in rref.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, rref.mat.get(i, a.cols + j));
            }
        }
        Ok(Some(x))
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn free_columns(pivots: &[usize], cols: usize) -> Vec<usize> {
    let mut free = Vec::with_capacity(cols - pivots.len());
    let mut next = pivots.iter().peekable();
    for c in 0..cols {
        if next.peek() == Some(&&c) {
            next.next();
        } else {
            free.push(c);
        }
    }
    free
}

/// Quotient map onto a cokernel. `basis[k]` is the coordinate whose unit
/// vector projects onto the `k`-th basis vector, so those unit vectors form a
/// section of the projection.
#[derive(Clone, Debug)]
pub struct Cokernel {
    pub projection: Matrix,
    pub basis: Vec<usize>,
}

/// Reduced row echelon form: the first `pivots.len()` rows are nonzero.
#[derive(Clone, Debug)]
pub struct Rref {
    pub mat: Matrix,
    pub pivots: Vec<usize>,
}

/// Dense row-major matrix of residues.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u16>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u16>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows * cols");
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from explicit rows, reducing every entry into the field.
    pub fn from_rows(field: Field, cols: usize, rows: &[Vec<i64>]) -> Self {
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged row");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, field.reduce(v));
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u16 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u16) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[u16] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[u16] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u16> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            out.data[r * out.cols..r * out.cols + self.cols].copy_from_slice(self.row(r));
            out.data[r * out.cols + self.cols..(r + 1) * out.cols].copy_from_slice(other.row(r));
        }
        out
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        out.write_block(0, 0, self);
        out.write_block(self.rows, self.cols, other);
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn write_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c));
            }
        }
    }

    pub fn submatrix(&self, rows: core::ops::Range<usize>, cols: core::ops::Range<usize>) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    /// Keeps the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }
}

// Packed GF(2) elimination. Row `r` occupies words `r*w .. (r+1)*w`.

fn pack_gf2(a: &Matrix) -> (Vec<u64>, usize) {
    let w = a.cols.div_ceil(64).max(1);
    let mut bits = vec![0u64; a.rows * w];
    for r in 0..a.rows {
        for c in 0..a.cols {
            if a.get(r, c) & 1 == 1 {
                bits[r * w + c / 64] |= 1 << (c % 64);
            }
        }
    }
    (bits, w)
}

/// Forward-and-backward elimination in place; returns pivot columns.
fn eliminate_gf2(bits: &mut [u64], rows: usize, cols: usize, w: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let (word, mask) = (col / 64, 1u64 << (col % 64));
        let Some(sel) = (row..rows).find(|&r| bits[r * w + word] & mask != 0) else {
            continue;
        };
        if sel != row {
            for k in 0..w {
                bits.swap(sel * w + k, row * w + k);
            }
        }
        for r in 0..rows {
            if r != row && bits[r * w + word] & mask != 0 {
                for k in word..w {
                    let v = bits[row * w + k];
                    bits[r * w + k] ^= v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

fn rref_gf2(a: &Matrix) -> Rref {
    let (mut bits, w) = pack_gf2(a);
    let pivots = eliminate_gf2(&mut bits, a.rows, a.cols, w);
    let mut mat = Matrix::zeros(a.rows, a.cols);
    for r in 0..a.rows {
        for c in 0..a.cols {
            if bits[r * w + c / 64] >> (c % 64) & 1 == 1 {
                mat.set(r, c, 1);
            }
        }
    }
    Rref { mat, pivots }
}

fn rank_gf2(a: &Matrix) -> usize {
    let (rows, cols) = (a.rows, a.cols);
    let (mut bits, w) = pack_gf2(a);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (word, mask) = (col / 64, 1u64 << (col % 64));
        let Some(sel) = (rank..rows).find(|&r| bits[r * w + word] & mask != 0) else {
            continue;
        };
        if sel != rank {
            for k in 0..w {
                bits.swap(sel * w + k, rank * w + k);
            }
        }
        for r in rank + 1..rows {
            if bits[r * w + word] & mask != 0 {
                for k in word..w {
                    let v = bits[rank * w + k];
                    bits[r * w + k] ^= v;
                }
            }
        }
        rank += 1;
    }
    rank
}
