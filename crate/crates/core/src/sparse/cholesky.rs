//! Up-looking sparse Cholesky for symmetric positive definite matrices.
//!
//! With a symmetric fill-reducing permutation `P` (minimum degree) the
//! factorization is `P A Pᵀ = L Lᵀ`, i.e. `A = R Rᵀ` with `R = Pᵀ L`. The
//! factor `R` is what the symmetrized Krylov operators need, so the solve
//! and multiply helpers are expressed in terms of `R`.

use super::lu::PIVOT_TOLERANCE;
use super::{minimum_degree, CscMatrix};
use crate::error::{MorError, Result};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct SparseCholesky {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
}

impl SparseCholesky {
    /// Factors a symmetric matrix given in full (both triangles) storage.
    /// Only the upper triangle of the permuted matrix is read.
    pub fn factor(a: &CscMatrix<f64>, name: &str) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(MorError::DimensionMismatch(format!(
                "{name} is {}x{}, expected square",
                a.nrows(),
                a.ncols()
            )));
        }
        let perm = minimum_degree(a);
        let mut iperm = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        let mut upper: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (r, c, v) in a.triplets() {
            let (i, j) = (iperm[r], iperm[c]);
            if i <= j {
                upper[j].push((i, v));
            }
        }
        let scale = a.max_abs();

        let parent = elimination_tree(&upper);
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut x = vec![0.0; n];
        let mut mark = vec![NONE; n];
        let mut stack = vec![0usize; n];
        let mut path = vec![0usize; n];

        for k in 0..n {
            // Nonzero pattern of row k of L, in topological order.
            let mut top = n;
            mark[k] = k;
            for &(i, v) in &upper[k] {
                x[i] += v;
                let mut i = i;
                let mut len = 0;
                while mark[i] != k {
                    path[len] = i;
                    len += 1;
                    mark[i] = k;
                    i = parent[i];
                    if i == NONE {
                        break;
                    }
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    stack[top] = path[len];
                }
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &i in &stack[top..n] {
                let col = &cols[i];
                let lki = x[i] / col[0].1;
                x[i] = 0.0;
                for &(r, lr) in &col[1..] {
                    x[r] -= lr * lki;
                }
                d -= lki * lki;
                cols[i].push((k, lki));
            }
            if !(d > PIVOT_TOLERANCE * scale) || !d.is_finite() {
                return Err(MorError::NotPositiveDefinite {
                    name: name.to_string(),
                    step: k,
                });
            }
            cols[k].push((k, d.sqrt()));
        }

        let mut l_ptr = Vec::with_capacity(n + 1);
        let mut l_idx = Vec::new();
        let mut l_val = Vec::new();
        for col in cols {
            l_ptr.push(l_idx.len());
            for (r, v) in col {
                l_idx.push(r);
                l_val.push(v);
            }
        }
        l_ptr.push(l_idx.len());
        Ok(SparseCholesky {
            n,
            perm,
            l_ptr,
            l_idx,
            l_val,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `R⁻¹ b` with `R = Pᵀ L`, i.e. `L⁻¹ P b`.
    pub fn solve_r(&self, b: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for j in 0..self.n {
            let start = self.l_ptr[j];
            x[j] /= self.l_val[start];
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for p in start + 1..self.l_ptr[j + 1] {
                x[self.l_idx[p]] -= self.l_val[p] * xj;
            }
        }
        x
    }

    /// `R⁻ᵀ b`, i.e. `Pᵀ L⁻ᵀ b`.
    pub fn solve_rt(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        for j in (0..self.n).rev() {
            let start = self.l_ptr[j];
            let mut acc = x[j];
            for p in start + 1..self.l_ptr[j + 1] {
                acc -= self.l_val[p] * x[self.l_idx[p]];
            }
            x[j] = acc / self.l_val[start];
        }
        let mut out = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }

    /// `R y = Pᵀ (L y)`.
    pub fn mul_r(&self, y: &[f64]) -> Vec<f64> {
        let mut ly = vec![0.0; self.n];
        for j in 0..self.n {
            let yj = y[j];
            if yj == 0.0 {
                continue;
            }
            for p in self.l_ptr[j]..self.l_ptr[j + 1] {
                ly[self.l_idx[p]] += self.l_val[p] * yj;
            }
        }
        let mut out = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = ly[new];
        }
        out
    }

    /// `Rᵀ x = Lᵀ (P x)`.
    pub fn mul_rt(&self, x: &[f64]) -> Vec<f64> {
        let px: Vec<f64> = self.perm.iter().map(|&o| x[o]).collect();
        (0..self.n)
            .map(|j| {
                (self.l_ptr[j]..self.l_ptr[j + 1])
                    .map(|p| self.l_val[p] * px[self.l_idx[p]])
                    .sum()
            })
            .collect()
    }

    /// `A⁻¹ b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_rt(&self.solve_r(b))
    }
}

fn elimination_tree(upper: &[Vec<(usize, f64)>]) -> Vec<usize> {
    let n = upper.len();
    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for (k, col) in upper.iter().enumerate() {
        for &(i, _) in col {
            let mut i = i;
            while i != NONE && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == NONE {
                    parent[i] = k;
                }
                i = next;
            }
        }
    }
    parent
}
