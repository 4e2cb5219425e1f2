//! Dense linear algebra over prime fields `F_p`.
//!
//! Entries are machine integers reduced into `[0, p)` after every operation.
//! The modulus must satisfy `p < 2^32` so that products fit in `u64`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::inv_mod;
use crate::error::{Error, Result};

/// Default ceiling on the number of candidate matrices scanned by [`enumerate_gl`].
pub const GL_ENUMERATION_CEILING: u128 = 1 << 24;

/// A residue of `F_p` carried together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u64,
    p: u64,
}

impl FpScalar {
    pub fn new(value: i64, p: u64) -> Self {
        FpScalar {
            value: value.rem_euclid(p as i64) as u64,
            p,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn inverse(self) -> Option<Self> {
        inv_mod(self.value, self.p).map(|v| FpScalar { value: v, p: self.p })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    p: u64,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize, p: u64) -> Self {
        assert!((2..(1 << 32)).contains(&p), "modulus out of range");
        FpMatrix {
            rows,
            cols,
            p,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, p: u64) -> Self {
        let mut m = Self::zeros(n, n, p);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    /// Builds a matrix from signed row data, reducing every entry mod `p`.
    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut m = Self::zeros(r, c, p);
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.data[i * c + j] = x.rem_euclid(p as i64) as u64;
            }
        }
        m
    }

    /// Builds a matrix from row-major residues already in `[0, p)`.
    pub fn from_residues(rows: usize, cols: usize, p: u64, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        assert!(data.iter().all(|&x| x < p), "entries must be reduced");
        FpMatrix { rows, cols, p, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(p: u64, rows: usize, columns: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len(), p);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &x) in col.iter().enumerate() {
                m.data[i * columns.len() + j] = x % p;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.data[i * self.cols + j] = value.rem_euclid(self.p as i64) as u64;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.p);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    /// Matrix product; panics when the inner dimensions or moduli disagree.
    pub fn mul(&self, rhs: &FpMatrix) -> FpMatrix {
        assert_eq!(self.p, rhs.p, "moduli differ");
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let p = self.p;
        let mut out = Self::zeros(self.rows, rhs.cols, p);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = (out.data[idx] + a * rhs.get(k, j)) % p;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(0, |acc, (&a, &b)| (acc + a * b) % self.p)
            })
            .collect()
    }

    pub fn add(&self, rhs: &FpMatrix) -> FpMatrix {
        assert_eq!((self.rows, self.cols, self.p), (rhs.rows, rhs.cols, rhs.p));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| (a + b) % self.p).collect();
        self.with_data(data)
    }

    pub fn scale(&self, c: u64) -> FpMatrix {
        let c = c % self.p;
        let data = self.data.iter().map(|a| a * c % self.p).collect();
        self.with_data(data)
    }

    pub fn neg(&self) -> FpMatrix {
        self.scale(self.p - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn with_data(&self, data: Vec<u64>) -> FpMatrix {
        FpMatrix {
            rows: self.rows,
            cols: self.cols,
            p: self.p,
            data,
        }
    }

    /// Reduced row echelon form with leftmost pivots, and the pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = rref_in_place(&mut m.data, m.rows, m.cols, m.p);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut data = self.data.clone();
        rref_in_place(&mut data, self.rows, self.cols, self.p).len()
    }

    /// Basis of the right null space `{x : Mx = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let (r, pivots) = self.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - r.get(row, free)) % p;
            }
            basis.push(v);
        }
        basis
    }

    pub fn determinant(&self) -> u64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let p = self.p;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1u64;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return 0;
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                det = (p - det) % p;
            }
            let d = a[col * n + col];
            det = det * d % p;
            let inv = inv_mod(d, p).expect("nonzero residue is invertible");
            for r in col + 1..n {
                let f = a[r * n + col] * inv % p;
                if f == 0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = (a[r * n + j] + (p - f) * a[col * n + j]) % p;
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = FpMatrix::zeros(n, 2 * n, self.p);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.get(i, j);
            }
            aug.data[i * 2 * n + n + i] = 1;
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = FpMatrix::zeros(n, n, self.p);
        for i in 0..n {
            for j in 0..n {
                inv.data[i * n + j] = r.get(i, n + j);
            }
        }
        Some(inv)
    }

    /// Sub-matrix made of the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> FpMatrix {
        let mut m = FpMatrix::zeros(self.rows, cols.len(), self.p);
        for i in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                m.data[i * cols.len() + k] = self.get(i, c);
            }
        }
        m
    }

    pub fn pow(&self, mut e: u64) -> FpMatrix {
        let mut base = self.clone();
        let mut acc = FpMatrix::identity(self.rows, self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order of an invertible square matrix.
    pub fn order(&self) -> u64 {
        let id = FpMatrix::identity(self.rows, self.p);
        let mut acc = self.clone();
        let mut k = 1;
        while acc != id {
            acc = acc.mul(self);
            k += 1;
        }
        k
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// In-place Gauss-Jordan elimination on a row-major buffer; returns pivot columns.
pub(crate) fn rref_in_place(a: &mut [u64], rows: usize, cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                a.swap(piv * cols + j, r * cols + j);
            }
        }
        let inv = inv_mod(a[r * cols + c], p).expect("nonzero residue is invertible");
        for j in c..cols {
            a[r * cols + j] = a[r * cols + j] * inv % p;
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a[i * cols + c];
            if f == 0 {
                continue;
            }
            for j in c..cols {
                a[i * cols + j] = (a[i * cols + j] + (p - f) * a[r * cols + j]) % p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a small row-major matrix, destroying the buffer.
pub(crate) fn rank_in_place(a: &mut [u64], rows: usize, cols: usize, p: u64) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if piv != r {
            for j in c..cols {
                a.swap(piv * cols + j, r * cols + j);
            }
        }
        let inv = inv_mod(a[r * cols + c], p).expect("nonzero residue is invertible");
        for i in r + 1..rows {
            let f = a[i * cols + c] * inv % p;
            if f == 0 {
                continue;
            }
            for j in c..cols {
                a[i * cols + j] = (a[i * cols + j] + (p - f) * a[r * cols + j]) % p;
            }
        }
        r += 1;
    }
    r
}

/// `|GL(v, p)| = prod_{j=1..v} (p^j - 1) * p^{(v^2 - v)/2}`.
pub fn gl_order(v: usize, p: u64) -> u128 {
    let p = p as u128;
    let mut order: u128 = 1;
    for j in 1..=v as u32 {
        order *= p.pow(j) - 1;
    }
    order * p.pow(((v * v - v) / 2) as u32)
}

/// Every invertible `v x v` matrix over `F_p`, each exactly once.
///
/// The scan covers all `p^(v^2)` matrices, which must not exceed `ceiling`.
pub fn enumerate_gl(v: usize, p: u64, ceiling: u128) -> Result<impl Iterator<Item = FpMatrix>> {
    let total = (p as u128).checked_pow((v * v) as u32).unwrap_or(u128::MAX);
    if total > ceiling {
        return Err(Error::ceiling("GL enumeration", total, ceiling));
    }
    Ok((0..total as u64).filter_map(move |mut idx| {
        let mut data = vec![0u64; v * v];
        for slot in data.iter_mut().rev() {
            *slot = idx % p;
            idx /= p;
        }
        let m = FpMatrix::from_residues(v, v, p, data);
        m.is_invertible().then_some(m)
    }))
}

/// Number of `l`-dimensional subspaces of `F_p^v`.
pub fn subspace_count(v: usize, l: usize, p: u64) -> u128 {
    assert!(l <= v, "subspace dimension exceeds ambient dimension");
    let p = p as u128;
    let num: u128 = (l + 1..=v).map(|j| p.pow(j as u32) - 1).product();
    let den: u128 = (1..=v - l).map(|j| p.pow(j as u32) - 1).product();
    num / den
}

/// Standard generators of `GL(v, p)`: elementary transvections and one scaling.
pub fn gl_generators(v: usize, p: u64) -> Vec<FpMatrix> {
    let mut gens = Vec::new();
    for i in 0..v {
        for j in 0..v {
            if i != j {
                let mut m = FpMatrix::identity(v, p);
                m.set(i, j, 1);
                gens.push(m);
            }
        }
    }
    let g = crate::arith::primitive_root(p);
    if g != 1 && v > 0 {
        let mut m = FpMatrix::identity(v, p);
        m.set(0, 0, g as i64);
        gens.push(m);
    }
    gens
}
