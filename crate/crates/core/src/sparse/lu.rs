//! Left-looking sparse LU with threshold partial pivoting (Gilbert–Peierls).
//!
//! Factors `P A Q = L U` where `Q` is a fill-reducing column order chosen up
//! front and `P` is chosen column by column during the numeric phase. Each
//! column of `L` is computed by a sparse triangular solve whose nonzero
//! pattern comes from a depth-first reach in the graph of the partial `L`.

use super::{minimum_degree, CscMatrix, Scalar};
use crate::error::{MorError, Result};

/// Diagonal entries are kept as pivots when at least this fraction of the
/// largest candidate in their column.
const DIAGONAL_PREFERENCE: f64 = 0.1;

/// Pivots at or below this fraction of `max |A_ij|` are treated as zero.
pub(crate) const PIVOT_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct SparseLu<T> {
    n: usize,
    // L is unit lower triangular; the first entry of each column is the
    // unit diagonal.
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<T>,
    // U is upper triangular; the last entry of each column is the diagonal.
    u_ptr: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<T>,
    pinv: Vec<usize>,
    q: Vec<usize>,
}

impl<T: Scalar> SparseLu<T> {
    /// Factors `a` using a minimum-degree column order.
    pub fn factor(a: &CscMatrix<T>, name: &str) -> Result<Self> {
        let q = minimum_degree(a);
        Self::factor_ordered(a, &q, name)
    }

    /// Factors `a` with a caller-provided column order, e.g. one computed
    /// once for a family of matrices sharing a pattern.
    pub fn factor_ordered(a: &CscMatrix<T>, q: &[usize], name: &str) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(MorError::DimensionMismatch(format!(
                "{name} is {}x{}, expected square",
                a.nrows(),
                a.ncols()
            )));
        }
        assert_eq!(q.len(), n);
        let scale = a.max_abs();
        if n > 0 && scale == 0.0 {
            return Err(MorError::Singular {
                name: name.to_string(),
                step: 0,
                pivot: 0.0,
            });
        }
        let threshold = PIVOT_TOLERANCE * scale;

        let mut l_ptr = Vec::with_capacity(n + 1);
        let mut u_ptr = Vec::with_capacity(n + 1);
        let mut l_idx = Vec::with_capacity(4 * a.nnz() + n);
        let mut l_val = Vec::with_capacity(4 * a.nnz() + n);
        let mut u_idx = Vec::with_capacity(4 * a.nnz() + n);
        let mut u_val = Vec::with_capacity(4 * a.nnz() + n);
        const UNSET: usize = usize::MAX;
        let mut pinv = vec![UNSET; n];

        let mut x = vec![T::zero(); n];
        let mut xi = vec![0usize; n];
        let mut pstack = vec![0usize; n];
        let mut mark = vec![usize::MAX; n];

        for k in 0..n {
            l_ptr.push(l_idx.len());
            u_ptr.push(u_idx.len());
            let col = q[k];

            // Reach: rows of x = L \ A(:, col) that can be nonzero, in
            // topological order xi[top..n].
            let mut top = n;
            for (i, _) in a.col(col) {
                if mark[i] != k {
                    top = dfs(
                        i, k, top, &mut xi, &mut pstack, &mut mark, &pinv, &l_ptr, &l_idx,
                    );
                }
            }
            for &i in &xi[top..n] {
                x[i] = T::zero();
            }
            for (i, v) in a.col(col) {
                x[i] = v;
            }
            for px in top..n {
                let j = xi[px];
                let jcol = pinv[j];
                if jcol == UNSET {
                    continue;
                }
                let xj = x[j];
                let end = if jcol + 1 < l_ptr.len() {
                    l_ptr[jcol + 1]
                } else {
                    l_idx.len()
                };
                for p in l_ptr[jcol] + 1..end {
                    let r = l_idx[p];
                    let lv: T = l_val[p];
                    x[r] -= lv * xj;
                }
            }

            // Pivot search among rows not yet pivotal.
            let mut ipiv = UNSET;
            let mut best = -1.0;
            for &i in &xi[top..n] {
                if pinv[i] == UNSET {
                    let t = x[i].modulus();
                    if t > best {
                        best = t;
                        ipiv = i;
                    }
                } else {
                    u_idx.push(pinv[i]);
                    u_val.push(x[i]);
                }
            }
            if ipiv == UNSET || best <= threshold {
                return Err(MorError::Singular {
                    name: name.to_string(),
                    step: k,
                    pivot: best.max(0.0),
                });
            }
            if pinv[col] == UNSET && mark[col] == k && x[col].modulus() >= DIAGONAL_PREFERENCE * best
            {
                ipiv = col;
            }
            let pivot = x[ipiv];
            u_idx.push(k);
            u_val.push(pivot);
            pinv[ipiv] = k;
            l_idx.push(ipiv);
            l_val.push(T::one());
            for &i in &xi[top..n] {
                if pinv[i] == UNSET {
                    l_idx.push(i);
                    l_val.push(x[i] / pivot);
                }
                x[i] = T::zero();
            }
        }
        l_ptr.push(l_idx.len());
        u_ptr.push(u_idx.len());
        for r in &mut l_idx {
            *r = pinv[*r];
        }
        Ok(SparseLu {
            n,
            l_ptr,
            l_idx,
            l_val,
            u_ptr,
            u_idx,
            u_val,
            pinv,
            q: q.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries in `L` and `U` together.
    pub fn factor_nnz(&self) -> usize {
        self.l_idx.len() + self.u_idx.len()
    }

    /// Solves `A x = b`, overwriting `b` with `x`.
    pub fn solve_in_place(&self, b: &mut [T]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = vec![T::zero(); n];
        for k in 0..n {
            x[self.pinv[k]] = b[k];
        }
        // L y = P b
        for j in 0..n {
            let xj = x[j];
            if xj == T::zero() {
                continue;
            }
            for p in self.l_ptr[j] + 1..self.l_ptr[j + 1] {
                x[self.l_idx[p]] -= self.l_val[p] * xj;
            }
        }
        // U z = y
        for j in (0..n).rev() {
            let last = self.u_ptr[j + 1] - 1;
            x[j] /= self.u_val[last];
            let xj = x[j];
            if xj == T::zero() {
                continue;
            }
            for p in self.u_ptr[j]..last {
                x[self.u_idx[p]] -= self.u_val[p] * xj;
            }
        }
        for k in 0..n {
            b[self.q[k]] = x[k];
        }
    }

    /// Solves `Aᵀ x = b` (plain transpose, no conjugation).
    pub fn solve_transpose_in_place(&self, b: &mut [T]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x: Vec<T> = (0..n).map(|k| b[self.q[k]]).collect();
        // Uᵀ y = Qᵀ b
        for j in 0..n {
            let last = self.u_ptr[j + 1] - 1;
            let mut acc = x[j];
            for p in self.u_ptr[j]..last {
                acc -= self.u_val[p] * x[self.u_idx[p]];
            }
            x[j] = acc / self.u_val[last];
        }
        // Lᵀ z = y
        for j in (0..n).rev() {
            let mut acc = x[j];
            for p in self.l_ptr[j] + 1..self.l_ptr[j + 1] {
                acc -= self.l_val[p] * x[self.l_idx[p]];
            }
            x[j] = acc;
        }
        for k in 0..n {
            b[k] = x[self.pinv[k]];
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_transpose(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_transpose_in_place(&mut x);
        x
    }

    /// Ratio of smallest to largest pivot magnitude; a cheap conditioning
    /// hint, not a condition number.
    pub fn pivot_ratio(&self) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for j in 0..self.n {
            let d = self.u_val[self.u_ptr[j + 1] - 1].modulus();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }
}

/// Depth-first search from row `start` in the graph of the partial `L`.
/// Finished nodes are pushed onto `xi[..top]` from the back.
#[allow(clippy::too_many_arguments)]
fn dfs(
    start: usize,
    stamp: usize,
    mut top: usize,
    xi: &mut [usize],
    pstack: &mut [usize],
    mark: &mut [usize],
    pinv: &[usize],
    l_ptr: &[usize],
    l_idx: &[usize],
) -> usize {
    // The recursion stack lives in the front of `xi`; it never overlaps the
    // finished region because each node is pushed at most once.
    let mut head: isize = 0;
    xi[0] = start;
    while head >= 0 {
        let h = head as usize;
        let j = xi[h];
        let jcol = pinv[j];
        if mark[j] != stamp {
            mark[j] = stamp;
            pstack[h] = if jcol == usize::MAX { 0 } else { l_ptr[jcol] + 1 };
        }
        let end = if jcol == usize::MAX {
            0
        } else if jcol + 1 < l_ptr.len() {
            l_ptr[jcol + 1]
        } else {
            l_idx.len()
        };
        let mut done = true;
        let mut p = pstack[h];
        while p < end {
            let i = l_idx[p];
            p += 1;
            if mark[i] == stamp {
                continue;
            }
            pstack[h] = p;
            head += 1;
            xi[head as usize] = i;
            done = false;
            break;
        }
        if done {
            head -= 1;
            top -= 1;
            xi[top] = j;
        }
    }
    top
}
