//! Column-major dense matrices over `f64`.
//!
//! `DenseMatrix` is the single carrier type for system matrices, iterates and
//! sketches. It is immutable in spirit: every public operation returns a new
//! matrix, so values can be shared freely across threads.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;

/// Dense real matrix stored column-major: entry `(i, j)` lives at `data[j * rows + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from column-major data, checking length and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                context: "from_vec",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from rows given in row-major order. Convenient in tests.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let m = rows.len();
        let n = if m == 0 { 0 } else { rows[0].len() };
        let mut data = vec![0.0; m * n];
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::ShapeMismatch {
                    context: "from_rows",
                    left: (m, n),
                    right: (i, r.len()),
                });
            }
            for (j, &v) in r.iter().enumerate() {
                data[j * m + i] = v;
            }
        }
        Self::from_vec(m, n, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a.data[i * n + i] = 1.0;
        }
        a
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut a = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            a.data[i * n + i] = v;
        }
        a
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut a = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                a.data[j * rows + i] = f(i, j);
            }
        }
        a
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.data[i * self.cols + j] = self.data[j * self.rows + i];
            }
        }
        t
    }

    /// `self * other`. Panics on shape mismatch; public entry points validate first.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut c = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let bcol = other.col(j);
            let ccol = c.col_mut(j);
            for (l, &b) in bcol.iter().enumerate() {
                if b != 0.0 {
                    let acol = &self.data[l * self.rows..(l + 1) * self.rows];
                    for i in 0..self.rows {
                        ccol[i] += acol[i] * b;
                    }
                }
            }
        }
        c
    }

    /// `selfᵀ * other` without materializing the transpose.
    pub fn tr_mul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "tr_mul shape mismatch");
        let mut c = Self::zeros(self.cols, other.cols);
        for j in 0..other.cols {
            let bcol = other.col(j);
            for l in 0..self.cols {
                let acol = self.col(l);
                let mut dot = 0.0;
                for i in 0..self.rows {
                    dot += acol[i] * bcol[i];
                }
                c.data[j * self.cols + l] = dot;
            }
        }
        c
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        fmath::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(fmath::abs(v)))
    }

    pub fn trace(&self) -> f64 {
        let k = self.rows.min(self.cols);
        (0..k).map(|i| self.get(i, i)).sum()
    }

    /// Column selection: `self * I_{:indices}`. This is the gather path that
    /// keeps sketched products at `O(rows * |indices|)`.
    pub fn gather_cols(&self, indices: &[usize]) -> Self {
        let mut g = Self::zeros(self.rows, indices.len());
        for (k, &j) in indices.iter().enumerate() {
            g.col_mut(k).copy_from_slice(self.col(j));
        }
        g
    }

    /// Row selection: `I_{:indices}ᵀ * self`.
    pub fn gather_rows(&self, indices: &[usize]) -> Self {
        let mut g = Self::zeros(indices.len(), self.cols);
        for j in 0..self.cols {
            for (k, &i) in indices.iter().enumerate() {
                g.data[j * indices.len() + k] = self.get(i, j);
            }
        }
        g
    }

    pub fn relative_asymmetry(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for j in 0..self.cols {
            for i in 0..j {
                let d = self.get(i, j) - self.get(j, i);
                acc += 2.0 * d * d;
            }
        }
        fmath::sqrt(acc) / norm
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        self.rows == self.cols && self.relative_asymmetry() <= rel_tol
    }

    /// `(self + selfᵀ) / 2`.
    pub fn symmetrize(&self) -> Self {
        assert_eq!(self.rows, self.cols);
        Self::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self.get(i, j) + self.get(j, i))
        })
    }
}
