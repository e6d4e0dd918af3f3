//! Compressed sparse column storage and the direct solvers built on it.

mod cholesky;
mod lu;
mod ordering;
mod scalar;

pub use cholesky::SparseCholesky;
pub use lu::SparseLu;
pub use ordering::minimum_degree;
pub use scalar::Scalar;

use nalgebra::DMatrix;

/// Sparse matrix in compressed sparse column form. Row indices inside a
/// column are strictly increasing; there are no duplicate entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix<T = f64> {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> CscMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CscMatrix {
            nrows,
            ncols,
            col_ptr: vec![0; ncols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed; entries that sum to exactly zero are dropped.
    ///
    /// Panics if an index is out of bounds.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut sorted: Vec<(usize, usize, T)> = triplets.to_vec();
        for &(r, c, _) in &sorted {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
        }
        sorted.sort_by_key(|a| (a.1, a.0));
        let mut col_ptr = vec![0usize; ncols + 1];
        let mut row_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<T> = Vec::with_capacity(sorted.len());
        let mut cols = Vec::with_capacity(sorted.len());
        let mut i = 0;
        while i < sorted.len() {
            let (r, c, mut v) = sorted[i];
            i += 1;
            while i < sorted.len() && sorted[i].0 == r && sorted[i].1 == c {
                v += sorted[i].2;
                i += 1;
            }
            if v != T::zero() {
                row_idx.push(r);
                values.push(v);
                cols.push(c);
            }
        }
        for &c in &cols {
            col_ptr[c + 1] += 1;
        }
        for c in 0..ncols {
            col_ptr[c + 1] += col_ptr[c];
        }
        CscMatrix {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, T::one())).collect();
        Self::from_triplets(n, n, &t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Entries of column `j` as `(row, value)` pairs.
    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// All stored entries in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.ncols).flat_map(move |j| self.col(j).map(move |(i, v)| (i, j, v)))
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        let range = self.col_ptr[col]..self.col_ptr[col + 1];
        match self.row_idx[range.clone()].binary_search(&row) {
            Ok(k) => self.values[range.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &t)
    }

    pub fn scale(&self, alpha: T) -> Self {
        let t: Vec<_> = self.triplets().map(|(i, j, v)| (i, j, v * alpha)).collect();
        Self::from_triplets(self.nrows, self.ncols, &t)
    }

    /// Rectangular block `A[r0..r0+nr, c0..c0+nc]`.
    pub fn block(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> Self {
        let t: Vec<_> = (c0..c0 + nc)
            .flat_map(|j| self.col(j).map(move |(i, v)| (i, j, v)))
            .filter(|&(i, _, _)| i >= r0 && i < r0 + nr)
            .map(|(i, j, v)| (i - r0, j - c0, v))
            .collect();
        Self::from_triplets(nr, nc, &t)
    }

    /// Entrywise sum `self + other`.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let t: Vec<_> = self.triplets().chain(other.triplets()).collect();
        Self::from_triplets(self.nrows, self.ncols, &t)
    }

    /// `y = A x` for a dense vector slice.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![T::zero(); self.nrows];
        for j in 0..self.ncols {
            let xj = x[j];
            if xj == T::zero() {
                continue;
            }
            for (i, v) in self.col(j) {
                y[i] += v * xj;
            }
        }
        y
    }

    /// `y = Aᵀ x`.
    pub fn tr_mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.nrows);
        (0..self.ncols)
            .map(|j| {
                let mut acc = T::zero();
                for (i, v) in self.col(j) {
                    acc += v * x[i];
                }
                acc
            })
            .collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl CscMatrix<f64> {
    /// `A x` for a complex vector.
    pub fn mul_vec_complex(&self, x: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![num_complex::Complex64::new(0.0, 0.0); self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            for (i, v) in self.col(j) {
                y[i] += xj * v;
            }
        }
        y
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut t = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != 0.0 {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), &t)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// `A X` for a dense block `X`.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.nrows(), self.ncols);
        let mut y = DMatrix::zeros(self.nrows, x.ncols());
        for c in 0..x.ncols() {
            for j in 0..self.ncols {
                let xj = x[(j, c)];
                if xj == 0.0 {
                    continue;
                }
                for (i, v) in self.col(j) {
                    y[(i, c)] += v * xj;
                }
            }
        }
        y
    }

    /// `Aᵀ X` for a dense block `X`.
    pub fn tr_mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.nrows(), self.nrows);
        let mut y = DMatrix::zeros(self.ncols, x.ncols());
        for c in 0..x.ncols() {
            for j in 0..self.ncols {
                let mut acc = 0.0;
                for (i, v) in self.col(j) {
                    acc += v * x[(i, c)];
                }
                y[(j, c)] = acc;
            }
        }
        y
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest `|A[i,j] - A[j,i]|` over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, j, v) in self.triplets() {
            worst = worst.max((v - self.get(j, i)).abs());
        }
        worst
    }

    /// Leading principal `k x k` block.
    pub fn leading_block(&self, k: usize) -> Self {
        let t: Vec<_> = self.triplets().filter(|&(i, j, _)| i < k && j < k).collect();
        Self::from_triplets(k, k, &t)
    }
}
